#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pulab/table.hpp"

namespace pulab {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

struct Successor {
  StateIndex state = 0;
  double probability = 0.0;

  friend bool operator==(const Successor&, const Successor&) = default;
};

/// Finite discounted MDP with deterministic mean rewards r(s,a).
///
/// Terminal states are absorbing with value 0; the reward of the transition
/// entering a terminal state is paid on that transition. Rows of a terminal
/// state carry no transition mass requirement.
class FiniteMdp {
 public:
  FiniteMdp() = default;
  FiniteMdp(std::size_t n_states, std::size_t n_actions, double discount);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  double discount() const { return discount_; }

  std::span<const Successor> successors(StateIndex s, ActionIndex a) const {
    return transitions_[s * n_actions_ + a];
  }
  double reward(StateIndex s, ActionIndex a) const { return rewards_(s, a); }
  const Table& rewards() const { return rewards_; }
  std::span<const double> initial_distribution() const { return initial_; }
  bool is_terminal(StateIndex s) const { return terminal_[s]; }
  bool has_terminal_states() const;

  void set_transition(StateIndex s, ActionIndex a, std::vector<Successor> successors);
  void set_reward(StateIndex s, ActionIndex a, double reward);
  void set_initial_distribution(std::vector<double> p0);
  void set_terminal(StateIndex s, bool terminal);

  /// Throws InvalidMdp when an invariant is broken.
  void validate() const;

  friend bool operator==(const FiniteMdp&, const FiniteMdp&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  double discount_ = 0.0;
  std::vector<std::vector<Successor>> transitions_;
  Table rewards_;
  std::vector<double> initial_;
  std::vector<bool> terminal_;
};

/// Stochastic policy pi(a|s); every row is a distribution.
struct Policy {
  Table probs;

  double operator()(StateIndex s, ActionIndex a) const { return probs(s, a); }
  std::span<const double> row(StateIndex s) const { return probs.row(s); }

  static Policy uniform(std::size_t n_states, std::size_t n_actions);
  /// Puts all mass on `actions[s]` in every state s.
  static Policy deterministic(std::size_t n_actions, std::span<const ActionIndex> actions);
  /// Same action everywhere.
  static Policy constant(std::size_t n_states, std::size_t n_actions, ActionIndex action);

  friend bool operator==(const Policy&, const Policy&) = default;
};

struct ValueFunctions {
  std::vector<double> v;
  Table q;
};

/// Exact evaluation: solves (I - gamma P_pi) v = r_pi with a dense LU, then one
/// Bellman backup for q. Terminal states get v = 0 and q = 0.
ValueFunctions evaluate_policy(const FiniteMdp& mdp, const Policy& pi);

/// Discounted objective p0 . v_pi.
double objective(const FiniteMdp& mdp, const Policy& pi);

/// q(s,a) = r(s,a) + gamma sum_s' P(s'|s,a) v(s'); zero rows for terminal states.
Table backup_q(const FiniteMdp& mdp, std::span<const double> v);

struct OptimalSolution {
  ValueFunctions values;
  Policy greedy;
  std::size_t iterations = 0;
};

/// Value iteration until the sup-norm residual drops below tol (1 - gamma) / gamma,
/// followed by a greedy policy with lowest-index tie-breaking.
OptimalSolution optimal_values(const FiniteMdp& mdp, double tol = 1e-10);

/// Lowest index among the maximizers of a row.
ActionIndex greedy_action(std::span<const double> row);

}  // namespace pulab
