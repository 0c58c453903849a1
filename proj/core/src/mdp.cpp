#include "pulab/mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pulab/errors.hpp"

namespace pulab {

namespace {

constexpr double kSimplexTol = 1e-12;

void check_state(const FiniteMdp& mdp, StateIndex s) {
  if (s >= mdp.n_states()) throw InvalidMdp("state index out of range: " + std::to_string(s));
}

}  // namespace

FiniteMdp::FiniteMdp(std::size_t n_states, std::size_t n_actions, double discount)
    : n_states_(n_states),
      n_actions_(n_actions),
      discount_(discount),
      transitions_(n_states * n_actions),
      rewards_(n_states, n_actions),
      initial_(n_states, 0.0),
      terminal_(n_states, false) {
  if (n_states == 0 || n_actions == 0) throw InvalidMdp("MDP needs at least one state and one action");
  if (!(discount >= 0.0 && discount < 1.0)) throw InvalidMdp("discount must lie in [0, 1)");
}

bool FiniteMdp::has_terminal_states() const {
  return std::find(terminal_.begin(), terminal_.end(), true) != terminal_.end();
}

void FiniteMdp::set_transition(StateIndex s, ActionIndex a, std::vector<Successor> successors) {
  check_state(*this, s);
  if (a >= n_actions_) throw InvalidMdp("action index out of range: " + std::to_string(a));
  for (const auto& succ : successors) check_state(*this, succ.state);
  transitions_[s * n_actions_ + a] = std::move(successors);
}

void FiniteMdp::set_reward(StateIndex s, ActionIndex a, double reward) {
  check_state(*this, s);
  if (a >= n_actions_) throw InvalidMdp("action index out of range: " + std::to_string(a));
  rewards_(s, a) = reward;
}

void FiniteMdp::set_initial_distribution(std::vector<double> p0) {
  if (p0.size() != n_states_) throw InvalidMdp("initial distribution has wrong length");
  initial_ = std::move(p0);
}

void FiniteMdp::set_terminal(StateIndex s, bool terminal) {
  check_state(*this, s);
  terminal_[s] = terminal;
}

void FiniteMdp::validate() const {
  double p0_sum = 0.0;
  for (double p : initial_) {
    if (!(p >= 0.0)) throw InvalidMdp("initial distribution has a negative entry");
    p0_sum += p;
  }
  if (std::abs(p0_sum - 1.0) > kSimplexTol) throw InvalidMdp("initial distribution does not sum to 1");

  for (StateIndex s = 0; s < n_states_; ++s) {
    if (terminal_[s]) continue;
    for (ActionIndex a = 0; a < n_actions_; ++a) {
      double total = 0.0;
      for (const auto& succ : successors(s, a)) {
        if (!(succ.probability >= 0.0))
          throw InvalidMdp("negative transition probability at (" + std::to_string(s) + ", " +
                           std::to_string(a) + ")");
        total += succ.probability;
      }
      if (std::abs(total - 1.0) > kSimplexTol)
        throw InvalidMdp("transition probabilities at (" + std::to_string(s) + ", " +
                         std::to_string(a) + ") sum to " + std::to_string(total));
      if (!std::isfinite(rewards_(s, a))) throw InvalidMdp("non-finite reward");
    }
  }
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return Policy{Table(n_states, n_actions, 1.0 / static_cast<double>(n_actions))};
}

Policy Policy::deterministic(std::size_t n_actions, std::span<const ActionIndex> actions) {
  Policy pi{Table(actions.size(), n_actions, 0.0)};
  for (StateIndex s = 0; s < actions.size(); ++s) pi.probs(s, actions[s]) = 1.0;
  return pi;
}

Policy Policy::constant(std::size_t n_states, std::size_t n_actions, ActionIndex action) {
  Policy pi{Table(n_states, n_actions, 0.0)};
  for (StateIndex s = 0; s < n_states; ++s) pi.probs(s, action) = 1.0;
  return pi;
}

Table backup_q(const FiniteMdp& mdp, std::span<const double> v) {
  Table q(mdp.n_states(), mdp.n_actions(), 0.0);
  const double gamma = mdp.discount();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      double future = 0.0;
      for (const auto& succ : mdp.successors(s, a)) future += succ.probability * v[succ.state];
      q(s, a) = mdp.reward(s, a) + gamma * future;
    }
  }
  return q;
}

ValueFunctions evaluate_policy(const FiniteMdp& mdp, const Policy& pi) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  if (pi.probs.rows() != mdp.n_states() || pi.probs.cols() != mdp.n_actions())
    throw InvalidMdp("policy shape does not match the MDP");

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const double gamma = mdp.discount();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    const auto row = static_cast<Eigen::Index>(s);
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const double w = pi(s, a);
      if (w == 0.0) continue;
      rhs(row) += w * mdp.reward(s, a);
      for (const auto& succ : mdp.successors(s, a)) {
        if (mdp.is_terminal(succ.state)) continue;
        system(row, static_cast<Eigen::Index>(succ.state)) -= gamma * w * succ.probability;
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd solution = lu.solve(rhs);
  if (!solution.allFinite()) throw std::runtime_error("policy evaluation produced a non-finite value");

  ValueFunctions out;
  out.v.assign(solution.data(), solution.data() + n);
  for (StateIndex s = 0; s < mdp.n_states(); ++s)
    if (mdp.is_terminal(s)) out.v[s] = 0.0;
  out.q = backup_q(mdp, out.v);
  return out;
}

double objective(const FiniteMdp& mdp, const Policy& pi) {
  const auto values = evaluate_policy(mdp, pi);
  const auto p0 = mdp.initial_distribution();
  double j = 0.0;
  for (StateIndex s = 0; s < mdp.n_states(); ++s) j += p0[s] * values.v[s];
  return j;
}

ActionIndex greedy_action(std::span<const double> row) {
  ActionIndex best = 0;
  for (ActionIndex a = 1; a < row.size(); ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

OptimalSolution optimal_values(const FiniteMdp& mdp, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("optimal_values: tol must be positive");
  const double gamma = mdp.discount();
  const double stop = gamma > 0.0 ? tol * (1.0 - gamma) / gamma : std::numeric_limits<double>::infinity();

  std::vector<double> v(mdp.n_states(), 0.0);
  OptimalSolution out;
  Table q;
  while (true) {
    q = backup_q(mdp, v);
    double residual = 0.0;
    for (StateIndex s = 0; s < mdp.n_states(); ++s) {
      const auto row = q.row(s);
      const double next = mdp.is_terminal(s) ? 0.0 : *std::max_element(row.begin(), row.end());
      residual = std::max(residual, std::abs(next - v[s]));
      v[s] = next;
    }
    ++out.iterations;
    if (residual < stop) break;
  }

  out.values.q = backup_q(mdp, v);
  out.values.v = std::move(v);
  std::vector<ActionIndex> actions(mdp.n_states());
  for (StateIndex s = 0; s < mdp.n_states(); ++s) actions[s] = greedy_action(out.values.q.row(s));
  out.greedy = Policy::deterministic(mdp.n_actions(), actions);
  return out;
}

}  // namespace pulab
