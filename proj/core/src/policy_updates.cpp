#include "pulab/policy_updates.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pulab/errors.hpp"

namespace pulab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double mean_under(std::span<const double> pi, std::span<const double> q) {
  double m = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) m += pi[a] * q[a];
  return m;
}

void pg_softmax_row(std::span<double> theta, std::span<const double> q, double weight) {
  std::vector<double> pi(theta.size());
  row_policy(Softmax{}, theta, pi);
  const double baseline = mean_under(pi, q);
  for (std::size_t a = 0; a < theta.size(); ++a) theta[a] += weight * pi[a] * (q[a] - baseline);
}

void pg_escort_row(double p, std::span<double> theta, std::span<const double> q, double weight) {
  std::vector<double> pi(theta.size());
  row_policy(Escort{p}, theta, pi);
  const double baseline = mean_under(pi, q);
  double norm_pp = 0.0;
  for (double x : theta) norm_pp += std::pow(std::abs(x), p);
  std::vector<double> step(theta.size());
  for (std::size_t a = 0; a < theta.size(); ++a) {
    const double sign = theta[a] < 0.0 ? -1.0 : 1.0;
    step[a] = weight * sign * p * std::pow(std::abs(theta[a]), p - 1.0) / norm_pp * (q[a] - baseline);
  }
  for (std::size_t a = 0; a < theta.size(); ++a) theta[a] += step[a];
}

void direct_row(std::span<double> theta, std::span<const double> q, double weight) {
  for (std::size_t a = 0; a < theta.size(); ++a) theta[a] += weight * q[a];
  project_simplex_in_place(theta);
}

void cross_entropy_row(std::span<double> theta, std::span<const double> q, double weight) {
  std::vector<double> pi(theta.size());
  row_policy(Softmax{}, theta, pi);
  const ActionIndex target = argmax_action(q);
  for (std::size_t a = 0; a < theta.size(); ++a) theta[a] += weight * ((a == target ? 1.0 : 0.0) - pi[a]);
}

void modified_cross_entropy_row(std::span<double> theta, std::span<const double> q, double weight) {
  std::vector<double> pi(theta.size());
  row_policy(Softmax{}, theta, pi);
  const ActionIndex target = argmax_action(q);
  const double gain = weight * (1.0 - pi[target]);
  theta[target] += gain;
  if (theta.size() < 2) return;
  const double penalty = gain / static_cast<double>(theta.size() - 1);
  for (std::size_t a = 0; a < theta.size(); ++a)
    if (a != target) theta[a] -= penalty;
}

}  // namespace

std::string_view rule_name(const UpdateKind& kind) {
  return std::visit(Overloaded{
                        [](const PgSm&) { return std::string_view("pg-sm"); },
                        [](const PgEs&) { return std::string_view("pg-es"); },
                        [](const Di&) { return std::string_view("di"); },
                        [](const Ce&) { return std::string_view("ce"); },
                        [](const Mce&) { return std::string_view("mce"); },
                    },
                    kind);
}

UpdateKind parse_rule(std::string_view name, double escort_p) {
  if (name == "pg-sm") return PgSm{};
  if (name == "pg-es") {
    if (!(escort_p > 0.0)) throw ConfigError("escort exponent p must be positive");
    return PgEs{escort_p};
  }
  if (name == "di") return Di{};
  if (name == "ce") return Ce{};
  if (name == "mce") return Mce{};
  throw ConfigError("unknown update rule '" + std::string(name) + "' (expected pg-sm, pg-es, di, ce, mce)");
}

Parametrization parametrization_for(const UpdateKind& kind) {
  return std::visit(Overloaded{
                        [](const PgEs& r) -> Parametrization { return Escort{r.p}; },
                        [](const Di&) -> Parametrization { return Direct{}; },
                        [](const auto&) -> Parametrization { return Softmax{}; },
                    },
                    kind);
}

void check_compatible(const UpdateKind& kind, const PolicyParams& params) {
  if (parametrization_for(kind) != params.kind)
    throw ConfigError("update rule " + std::string(rule_name(kind)) + " cannot drive " +
                      to_string(params.kind) + " parameters");
}

ActionIndex argmax_action(std::span<const double> q_row) { return greedy_action(q_row); }

void update_row(const UpdateKind& kind, const Parametrization& param_kind, std::span<double> theta_row,
                std::span<const double> q_row, double weight) {
  if (theta_row.size() != q_row.size()) throw std::invalid_argument("update_row: shape mismatch");
  if (weight == 0.0) return;
  std::visit(Overloaded{
                 [&](const PgSm&) { pg_softmax_row(theta_row, q_row, weight); },
                 [&](const PgEs&) { pg_escort_row(std::get<Escort>(param_kind).p, theta_row, q_row, weight); },
                 [&](const Di&) { direct_row(theta_row, q_row, weight); },
                 [&](const Ce&) { cross_entropy_row(theta_row, q_row, weight); },
                 [&](const Mce&) { modified_cross_entropy_row(theta_row, q_row, weight); },
             },
             kind);
}

PolicyParams apply_update(const UpdateKind& kind, const PolicyParams& params, std::span<const double> d,
                          const Table& q, double eta) {
  check_compatible(kind, params);
  if (d.size() != params.n_states() || q.rows() != params.n_states() || q.cols() != params.n_actions())
    throw std::invalid_argument("apply_update: shape mismatch");
  PolicyParams next = params;
  for (StateIndex s = 0; s < params.n_states(); ++s) {
    if (d[s] < 0.0) throw std::invalid_argument("apply_update: negative state weight");
    update_row(kind, params.kind, next.theta.row(s), q.row(s), eta * d[s]);
  }
  return next;
}

PolicyParams expected_actor_update(const UpdateKind& kind, const PolicyParams& params, StateIndex s,
                                   std::span<const double> q_row, double eta) {
  check_compatible(kind, params);
  if (s >= params.n_states() || q_row.size() != params.n_actions())
    throw std::invalid_argument("expected_actor_update: shape mismatch");
  PolicyParams next = params;
  update_row(kind, params.kind, next.theta.row(s), q_row, eta);
  return next;
}

}  // namespace pulab
