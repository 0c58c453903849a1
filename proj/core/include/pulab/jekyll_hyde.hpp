#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pulab/environments.hpp"
#include "pulab/mdp.hpp"
#include "pulab/parametrization.hpp"
#include "pulab/policy_updates.hpp"
#include "pulab/rng.hpp"

namespace pulab {

struct Transition {
  StateIndex state = 0;
  ActionIndex action = 0;
  StateIndex next_state = 0;
  double reward = 0.0;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

enum class Personality { Jekyll, Hyde };

/// Schedule evaluated at the global step counter t; outputs are clamped to [0, 1].
using ScheduleFn = std::function<double(std::int64_t)>;

ScheduleFn constant_schedule(double value);
/// min{1, scale / sqrt(t)}; t = 0 maps to 1.
ScheduleFn inverse_sqrt_schedule(double scale);

struct Schedules {
  ScheduleFn epsilon;    // probability of handing the next trajectory to Hyde
  ScheduleFn offpolicy;  // probability of updating from Hyde's buffer
  double eta_actor = 1.0;
  double eta_critic = 0.1;
};

enum class ExplorationSetting { NoExplo, LowOffPol, HiOffPol };

std::string to_string(ExplorationSetting setting);
/// Throws ConfigError on an unknown name.
ExplorationSetting parse_setting(const std::string& name);

/// NoExplo: eps = o = 0. LowOffPol: eps = o = min{1, 10/sqrt t}. HiOffPol: eps = min{1, 10/sqrt t}, o = 1/2.
Schedules make_schedules(ExplorationSetting setting, double eta_actor, double eta_critic = 0.1);

struct AgentOptions {
  /// Probability of ending a trajectory after each step (geometric horizon).
  /// Unset: 1 - gamma when the MDP has no terminal states, 0 otherwise.
  std::optional<double> reset_probability;
};

/// Dr Jekyll (expected-update actor-critic) and Mr Hyde (Q-learning on UCB
/// rewards) sharing one environment stream. Hyde picks uniformly among the
/// untried actions of a state before acting greedily on its Q-table.
/// Single-threaded; one instance per run.
class JekyllHydeAgent {
 public:
  JekyllHydeAgent(const FiniteMdp& mdp, UpdateKind rule, Schedules schedules, std::uint64_t seed,
                  AgentOptions options = {});

  /// Acts with the personality in control, stores the transition in that
  /// personality's buffer and possibly hands over control at trajectory end.
  Transition behavior_step();

  /// Samples one buffered transition (Hyde's buffer w.p. o_t) and updates
  /// Hyde's Q, Jekyll's critic and Jekyll's actor at the sampled state.
  void update_step();

  /// behavior_step followed by update_step.
  void step();

  const PolicyParams& jekyll_params() const { return params_; }
  const Table& critic() const { return critic_; }
  const Table& hyde_q() const { return hyde_q_; }
  const std::vector<std::int64_t>& visit_counts() const { return visits_; }
  const std::vector<Transition>& jekyll_buffer() const { return jekyll_buffer_; }
  const std::vector<Transition>& hyde_buffer() const { return hyde_buffer_; }
  Personality in_control() const { return in_control_; }
  std::int64_t step_counter() const { return t_; }
  StateIndex current_state() const { return state_; }
  const UpdateKind& rule() const { return rule_; }

  /// Exact policy of Jekyll's actor.
  Policy jekyll_policy() const { return policy_of(params_); }

 private:
  ActionIndex hyde_action(StateIndex s);
  void start_trajectory();

  const FiniteMdp* mdp_;
  UpdateKind rule_;
  Schedules schedules_;
  Rng rng_;
  double reset_probability_;

  PolicyParams params_;
  Table critic_;
  Table hyde_q_;
  std::vector<std::int64_t> visits_;
  std::vector<Transition> jekyll_buffer_;
  std::vector<Transition> hyde_buffer_;
  Personality in_control_ = Personality::Jekyll;
  std::int64_t t_ = 0;
  StateIndex state_ = 0;
  std::vector<double> scratch_;
};

struct CurvePoint {
  std::int64_t step = 0;
  double jbar = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string rule;
  double eta = 0.0;
  std::string setting;
  std::string env;
  /// First checkpoint at which jbar >= threshold; total_steps when censored.
  std::int64_t steps = 0;
  bool censored = false;
  std::vector<CurvePoint> curve;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunOptions {
  std::int64_t total_steps = 10000;
  std::int64_t checkpoint_interval = 100;
  double threshold = 0.5;
  /// Stop once the threshold is crossed (the curve ends there).
  bool stop_at_threshold = false;
  AgentOptions agent;
};

/// Interleaves behavior and update steps; evaluates Jekyll's policy exactly at
/// step 0 and every checkpoint_interval steps.
RunRecord run_agent(const FiniteMdp& mdp, const UpdateRule& rule, const Schedules& schedules,
                    const PerformanceScale& scale, const RunOptions& options, std::uint64_t seed);

}  // namespace pulab
