#include "pulab/jekyll_hyde.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pulab/errors.hpp"

namespace pulab {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

StateIndex sample_successor(const FiniteMdp& mdp, StateIndex s, ActionIndex a, Rng& rng) {
  const auto succ = mdp.successors(s, a);
  if (succ.size() == 1) return succ.front().state;
  double u = rng.uniform01();
  for (const auto& x : succ) {
    if (u < x.probability) return x.state;
    u -= x.probability;
  }
  return succ.back().state;
}

}  // namespace

ScheduleFn constant_schedule(double value) {
  const double v = clamp01(value);
  return [v](std::int64_t) { return v; };
}

ScheduleFn inverse_sqrt_schedule(double scale) {
  return [scale](std::int64_t t) {
    if (t <= 0) return 1.0;
    return clamp01(std::min(1.0, scale / std::sqrt(static_cast<double>(t))));
  };
}

std::string to_string(ExplorationSetting setting) {
  switch (setting) {
    case ExplorationSetting::NoExplo: return "NoExplo";
    case ExplorationSetting::LowOffPol: return "LowOffPol";
    case ExplorationSetting::HiOffPol: return "HiOffPol";
  }
  return "unknown";
}

ExplorationSetting parse_setting(const std::string& name) {
  if (name == "NoExplo") return ExplorationSetting::NoExplo;
  if (name == "LowOffPol") return ExplorationSetting::LowOffPol;
  if (name == "HiOffPol") return ExplorationSetting::HiOffPol;
  throw ConfigError("unknown exploration setting '" + name + "' (expected NoExplo, LowOffPol, HiOffPol)");
}

Schedules make_schedules(ExplorationSetting setting, double eta_actor, double eta_critic) {
  Schedules out;
  out.eta_actor = eta_actor;
  out.eta_critic = eta_critic;
  switch (setting) {
    case ExplorationSetting::NoExplo:
      out.epsilon = constant_schedule(0.0);
      out.offpolicy = constant_schedule(0.0);
      break;
    case ExplorationSetting::LowOffPol:
      out.epsilon = inverse_sqrt_schedule(10.0);
      out.offpolicy = inverse_sqrt_schedule(10.0);
      break;
    case ExplorationSetting::HiOffPol:
      out.epsilon = inverse_sqrt_schedule(10.0);
      out.offpolicy = constant_schedule(0.5);
      break;
  }
  return out;
}

JekyllHydeAgent::JekyllHydeAgent(const FiniteMdp& mdp, UpdateKind rule, Schedules schedules, std::uint64_t seed,
                                 AgentOptions options)
    : mdp_(&mdp),
      rule_(rule),
      schedules_(std::move(schedules)),
      rng_(seed),
      params_(uniform_params(parametrization_for(rule), mdp.n_states(), mdp.n_actions())),
      critic_(mdp.n_states(), mdp.n_actions(), 0.0),
      hyde_q_(mdp.n_states(), mdp.n_actions(), 0.0),
      visits_(mdp.n_states() * mdp.n_actions(), 0),
      scratch_(mdp.n_actions()) {
  if (!schedules_.epsilon || !schedules_.offpolicy) throw ConfigError("agent schedules are not set");
  if (!(schedules_.eta_actor >= 0.0) || !(schedules_.eta_critic > 0.0))
    throw ConfigError("actor rate must be >= 0 and critic rate > 0");
  reset_probability_ = options.reset_probability.value_or(mdp.has_terminal_states() ? 0.0 : 1.0 - mdp.discount());
  if (!(reset_probability_ >= 0.0 && reset_probability_ <= 1.0))
    throw ConfigError("reset probability must lie in [0, 1]");
  start_trajectory();
}

void JekyllHydeAgent::start_trajectory() {
  state_ = rng_.categorical(mdp_->initial_distribution());
}

ActionIndex JekyllHydeAgent::hyde_action(StateIndex s) {
  // An untried pair has an unbounded bonus 1/sqrt(0): try those first.
  const std::size_t n_actions = mdp_->n_actions();
  std::size_t untried = 0;
  for (ActionIndex a = 0; a < n_actions; ++a) untried += (visits_[s * n_actions + a] == 0);
  if (untried > 0) {
    std::size_t pick = rng_.uniform_index(untried);
    for (ActionIndex a = 0; a < n_actions; ++a) {
      if (visits_[s * n_actions + a] != 0) continue;
      if (pick == 0) return a;
      --pick;
    }
  }
  const auto row = hyde_q_.row(s);
  const double best = *std::max_element(row.begin(), row.end());
  std::size_t ties = 0;
  for (double x : row) ties += (x == best);
  std::size_t pick = rng_.uniform_index(ties);
  for (ActionIndex a = 0; a < row.size(); ++a) {
    if (row[a] != best) continue;
    if (pick == 0) return a;
    --pick;
  }
  return 0;
}

Transition JekyllHydeAgent::behavior_step() {
  const StateIndex s = state_;
  ActionIndex a = 0;
  if (in_control_ == Personality::Jekyll) {
    row_policy(params_.kind, params_.theta.row(s), scratch_);
    a = rng_.categorical(scratch_);
  } else {
    a = hyde_action(s);
  }
  const StateIndex next = sample_successor(*mdp_, s, a, rng_);
  Transition tr{s, a, next, mdp_->reward(s, a), mdp_->is_terminal(next)};

  (in_control_ == Personality::Jekyll ? jekyll_buffer_ : hyde_buffer_).push_back(tr);
  ++visits_[s * mdp_->n_actions() + a];

  const bool trajectory_over = tr.terminal || (reset_probability_ > 0.0 && rng_.bernoulli(reset_probability_));
  if (trajectory_over) {
    in_control_ = rng_.bernoulli(clamp01(schedules_.epsilon(t_))) ? Personality::Hyde : Personality::Jekyll;
    start_trajectory();
  } else {
    state_ = next;
  }
  return tr;
}

void JekyllHydeAgent::update_step() {
  const bool want_hyde = rng_.bernoulli(clamp01(schedules_.offpolicy(t_)));
  const std::vector<Transition>* buffer = want_hyde ? &hyde_buffer_ : &jekyll_buffer_;
  if (buffer->empty()) buffer = want_hyde ? &jekyll_buffer_ : &hyde_buffer_;
  ++t_;
  if (buffer->empty()) return;
  const Transition tr = (*buffer)[rng_.uniform_index(buffer->size())];

  const double gamma = mdp_->discount();
  const double lr = schedules_.eta_critic;

  // Hyde: Q-learning on the count-based bonus 1/sqrt(n(s,a)).
  {
    const auto n = visits_[tr.state * mdp_->n_actions() + tr.action];
    const double bonus = 1.0 / std::sqrt(static_cast<double>(n));
    double future = 0.0;
    if (!tr.terminal) {
      const auto next = hyde_q_.row(tr.next_state);
      future = *std::max_element(next.begin(), next.end());
    }
    double& cell = hyde_q_(tr.state, tr.action);
    cell += lr * (bonus + gamma * future - cell);
  }

  // Jekyll's critic: expected SARSA under the current actor.
  {
    double future = 0.0;
    if (!tr.terminal) {
      row_policy(params_.kind, params_.theta.row(tr.next_state), scratch_);
      const auto next = critic_.row(tr.next_state);
      for (ActionIndex a = 0; a < next.size(); ++a) future += scratch_[a] * next[a];
    }
    double& cell = critic_(tr.state, tr.action);
    cell += lr * (tr.reward + gamma * future - cell);
  }

  update_row(rule_, params_.kind, params_.theta.row(tr.state), critic_.row(tr.state), schedules_.eta_actor);
}

void JekyllHydeAgent::step() {
  behavior_step();
  update_step();
}

RunRecord run_agent(const FiniteMdp& mdp, const UpdateRule& rule, const Schedules& schedules,
                    const PerformanceScale& scale, const RunOptions& options, std::uint64_t seed) {
  if (options.total_steps < 0 || options.checkpoint_interval <= 0)
    throw ConfigError("run needs total_steps >= 0 and checkpoint_interval > 0");
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");

  Schedules sched = schedules;
  sched.eta_actor = rule.eta;
  JekyllHydeAgent agent(mdp, rule.kind, std::move(sched), seed, options.agent);

  RunRecord record;
  record.seed = seed;
  record.rule = std::string(rule_name(rule.kind));
  record.eta = rule.eta;
  record.steps = options.total_steps;
  record.censored = true;

  auto checkpoint = [&](std::int64_t step) {
    const double jbar = scale(objective(mdp, agent.jekyll_policy()));
    record.curve.push_back({step, jbar});
    if (record.censored && jbar >= options.threshold) {
      record.censored = false;
      record.steps = step;
    }
  };

  checkpoint(0);
  for (std::int64_t step = 1; step <= options.total_steps; ++step) {
    if (options.stop_at_threshold && !record.censored) break;
    agent.step();
    if (step % options.checkpoint_interval == 0) checkpoint(step);
  }
  return record;
}

}  // namespace pulab
