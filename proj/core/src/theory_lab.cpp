#include "pulab/theory_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "pulab/errors.hpp"
#include "pulab/records_csv.hpp"

namespace pulab {

namespace {

bool is_pg(const UpdateKind& rule) {
  return std::holds_alternative<PgSm>(rule) || std::holds_alternative<PgEs>(rule);
}

bool check_bound(BoundKind kind, double measured, double bound) {
  switch (kind) {
    case BoundKind::Lower: return measured < bound;
    case BoundKind::Exact: return measured != bound;
    case BoundKind::Upper: return measured > bound;
  }
  return false;
}

double first_action_probability(const PolicyParams& params, StateIndex s) {
  std::array<double, 2> pi{};
  row_policy(params.kind, params.theta.row(s), pi);
  return pi[0];
}

void validate_rate(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("learning rate must be positive and finite");
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Lower: return "lower";
    case BoundKind::Exact: return "exact";
    case BoundKind::Upper: return "upper";
  }
  return "unknown";
}

std::string to_string(LearningSchedule schedule) {
  return schedule == LearningSchedule::Constant ? "constant" : "decaying";
}

LearningSchedule parse_schedule(const std::string& name) {
  if (name == "constant") return LearningSchedule::Constant;
  if (name == "decaying") return LearningSchedule::Decaying;
  throw ConfigError("unknown schedule '" + name + "' (expected constant or decaying)");
}

double unlearning_bound(const UpdateKind& rule, double eta, std::int64_t n, LearningSchedule schedule) {
  const double nd = static_cast<double>(n);
  const double rn = std::sqrt(nd);
  if (schedule == LearningSchedule::Constant) {
    if (is_pg(rule)) return nd;
    if (std::holds_alternative<Di>(rule)) return std::min(nd, std::ceil(1.0 / eta));
    return 2.0 + std::log1p(2.0 * eta * nd) / eta;
  }
  if (is_pg(rule)) return 3.0 * nd - 4.0 * rn + 1.0;
  if (std::holds_alternative<Di>(rule)) {
    const double a = 1.0 / eta + 1.0;
    return std::min(3.0 * nd + 4.0 * rn + 1.0, a * a + rn * (2.0 + 2.0 / eta));
  }
  const double l = std::log1p(4.0 * eta * rn);
  const double a = 4.0 + l / (2.0 * eta);
  return a * a + rn * (8.0 + l / eta);
}

UnlearnReport run_unlearning(const UpdateKind& rule, double eta, std::int64_t n, LearningSchedule schedule,
                             std::int64_t budget) {
  validate_rate(eta);
  if (n < 0) throw ConfigError("unlearning needs n >= 0");
  if (budget < 1) throw ConfigError("unlearning budget must be positive");

  PolicyParams params = uniform_params(parametrization_for(rule), 1, 2);
  const double pi0 = first_action_probability(params, 0);
  const std::array<double, 2> toward_a1{1.0, 0.0};
  const std::array<double, 2> toward_a2{0.0, 1.0};

  std::int64_t t = 0;
  auto rate = [&]() {
    ++t;
    return schedule == LearningSchedule::Constant ? eta : eta / std::sqrt(static_cast<double>(t));
  };

  for (std::int64_t i = 0; i < n; ++i) update_row(rule, params.kind, params.theta.row(0), toward_a1, rate());

  UnlearnReport report;
  report.rule = rule;
  report.eta = eta;
  report.schedule = schedule;
  report.n = n;
  report.censored = true;
  report.n_prime = budget;
  for (std::int64_t k = 1; k <= budget; ++k) {
    update_row(rule, params.kind, params.theta.row(0), toward_a2, rate());
    if (first_action_probability(params, 0) <= pi0) {
      report.n_prime = k;
      report.censored = false;
      break;
    }
  }

  report.bound = unlearning_bound(rule, eta, n, schedule);
  report.bound_checked = report.bound;
  if (is_pg(rule)) {
    report.bound_kind = BoundKind::Lower;
  } else if (std::holds_alternative<Di>(rule) && schedule == LearningSchedule::Constant) {
    report.bound_kind = BoundKind::Exact;
  } else {
    report.bound_kind = BoundKind::Upper;
    if (schedule == LearningSchedule::Constant) report.bound_checked = std::ceil(report.bound);
  }
  report.violated = check_bound(report.bound_kind, static_cast<double>(report.n_prime), report.bound_checked);
  // A censored run only establishes n' >= budget, which cannot witness a lower or exact bound.
  if (report.censored && report.bound_kind != BoundKind::Upper)
    report.violated = report.bound_kind == BoundKind::Exact && static_cast<double>(budget) > report.bound_checked;
  return report;
}

double domino_bound(const UpdateKind& rule, double eta, std::size_t chain_length) {
  const double s1 = static_cast<double>(chain_length) - 1.0;
  if (is_pg(rule)) return std::ldexp(1.0, static_cast<int>(chain_length) - 1);
  if (std::holds_alternative<Di>(rule)) return 1.0 + s1 / eta;
  if (chain_length < 3) return std::numeric_limits<double>::infinity();
  return 32.0 * std::exp(8.0 * eta + 3.0) / (eta * eta * eta) * s1 * std::log(s1);
}

DominoReport run_domino(const UpdateKind& rule, double eta, std::size_t chain_length, std::int64_t budget) {
  validate_rate(eta);
  if (chain_length < 2) throw ConfigError("domino needs at least 2 states");
  if (budget < 1) throw ConfigError("domino budget must be positive");

  const std::size_t n = chain_length;
  PolicyParams params = uniform_params(parametrization_for(rule), n, 2);
  std::vector<double> pi0_a2(n);
  std::vector<double> pi_a2(n);
  auto refresh = [&](std::vector<double>& out) {
    for (StateIndex s = 0; s < n; ++s) out[s] = 1.0 - first_action_probability(params, s);
  };
  refresh(pi0_a2);
  pi_a2 = pi0_a2;

  Table q(n, 2, 0.0);
  const std::vector<double> d(n, 1.0);

  DominoReport report;
  report.rule = rule;
  report.eta = eta;
  report.chain_length = n;
  report.censored = true;
  report.steps = budget;
  for (std::int64_t t = 1; t <= budget; ++t) {
    for (StateIndex s = 0; s + 1 < n; ++s) {
      const bool flipped = pi_a2[s + 1] > pi0_a2[s + 1];
      q(s, 0) = flipped ? 0.0 : 1.0;
      q(s, 1) = flipped ? 1.0 : 0.0;
    }
    q(n - 1, 0) = 0.0;
    q(n - 1, 1) = 1.0;
    for (StateIndex s = 0; s < n; ++s) update_row(rule, params.kind, params.theta.row(s), q.row(s), eta * d[s]);
    refresh(pi_a2);
    if (pi_a2[0] > pi0_a2[0]) {
      report.steps = t;
      report.censored = false;
      break;
    }
  }

  report.bound = domino_bound(rule, eta, n);
  report.bound_kind = is_pg(rule) ? BoundKind::Lower : BoundKind::Upper;
  report.violated = check_bound(report.bound_kind, static_cast<double>(report.steps), report.bound);
  if (report.censored && report.bound_kind == BoundKind::Lower) report.violated = false;
  return report;
}

bool check_gravity_condition(const UpdateKind& rule, const PolicyParams& params, std::span<const double> q_row,
                             double eta) {
  check_compatible(rule, params);
  if (params.n_states() != 1 || q_row.size() != params.n_actions())
    throw std::invalid_argument("check_gravity_condition: expects a single-state parameter row");
  const std::size_t na = params.n_actions();
  std::vector<double> before(na);
  std::vector<double> after(na);
  row_policy(params.kind, params.theta.row(0), before);
  std::vector<double> theta(params.theta.row(0).begin(), params.theta.row(0).end());
  update_row(rule, params.kind, theta, q_row, eta);
  row_policy(params.kind, theta, after);

  const ActionIndex target = argmax_action(q_row);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < na; ++a) best = std::max(best, after[a] - before[a]);
  return after[target] - before[target] >= best - kGravityTieTolerance;
}

MonotonicityReport check_value_monotonicity(const FiniteMdp& mdp, const UpdateKind& rule, const PolicyParams& params,
                                            std::span<const double> d, double eta) {
  const ValueFunctions before = evaluate_policy(mdp, policy_of(params));
  const PolicyParams next = apply_update(rule, params, d, before.q, eta);
  const ValueFunctions after = evaluate_policy(mdp, policy_of(next));
  MonotonicityReport report;
  report.delta_v.resize(before.v.size());
  for (std::size_t s = 0; s < before.v.size(); ++s) {
    report.delta_v[s] = after.v[s] - before.v[s];
    if (report.delta_v[s] < -kMonotonicityTolerance) report.monotone = false;
  }
  return report;
}

TheoryRow to_row(const UnlearnReport& report) {
  return {"unlearn-" + to_string(report.schedule), std::string(rule_name(report.rule)), report.eta, report.n,
          report.n_prime, report.bound, report.violated};
}

TheoryRow to_row(const DominoReport& report) {
  return {"domino", std::string(rule_name(report.rule)), report.eta, static_cast<std::int64_t>(report.chain_length),
          report.steps, report.bound, report.violated};
}

void write_theory_csv(std::ostream& out, std::span<const TheoryRow> rows) {
  out << "setting,rule,eta,n_or_S,measured,bound,violated\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.rule << ',' << format_double(r.eta) << ',' << r.n_or_s << ',' << r.measured << ','
        << format_double(r.bound) << ',' << (r.violated ? 1 : 0) << '\n';
  }
}

}  // namespace pulab
