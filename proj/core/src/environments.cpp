#include "pulab/environments.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pulab/errors.hpp"
#include "pulab/rng.hpp"

namespace pulab {

FiniteMdp make_random_mdp(const RandomMdpSpec& spec) {
  if (spec.n_states == 0 || spec.n_actions == 0) throw ConfigError("random MDP needs states and actions");
  if (spec.connectivity == 0 || spec.connectivity > spec.n_states)
    throw ConfigError("random MDP connectivity must lie in [1, n_states]");

  Rng rng(spec.seed);
  FiniteMdp mdp(spec.n_states, spec.n_actions, kBenchmarkDiscount);
  std::vector<double> cuts(spec.connectivity + 1);
  for (StateIndex s = 0; s < spec.n_states; ++s) {
    for (ActionIndex a = 0; a < spec.n_actions; ++a) {
      std::vector<StateIndex> targets(spec.connectivity);
      for (auto& t : targets) t = static_cast<StateIndex>(rng.uniform_index(spec.n_states));

      cuts.front() = 0.0;
      cuts.back() = 1.0;
      for (std::size_t k = 1; k < spec.connectivity; ++k) cuts[k] = rng.uniform01();
      std::sort(cuts.begin() + 1, cuts.end() - 1);

      std::vector<Successor> successors;
      for (std::size_t k = 0; k < spec.connectivity; ++k) {
        const double mass = cuts[k + 1] - cuts[k];
        auto it = std::find_if(successors.begin(), successors.end(),
                               [&](const Successor& x) { return x.state == targets[k]; });
        if (it != successors.end())
          it->probability += mass;
        else
          successors.push_back({targets[k], mass});
      }
      mdp.set_transition(s, a, std::move(successors));
      mdp.set_reward(s, a, rng.uniform01());
    }
  }
  std::vector<double> p0(spec.n_states, 0.0);
  p0[0] = 1.0;
  mdp.set_initial_distribution(std::move(p0));
  mdp.validate();
  return mdp;
}

FiniteMdp make_chain(const ChainSpec& spec) {
  if (spec.n_states < 3) throw ConfigError("chain needs at least 3 states");
  if (!(spec.beta > 0.0 && spec.beta < 1.0)) throw ConfigError("chain beta must lie in (0, 1)");
  const std::size_t walks = spec.duplicate_optimal ? spec.walk_copies : 1;
  if (walks == 0) throw ConfigError("chain needs at least one walk action");
  const std::size_t n_actions = 1 + walks + (spec.cliff ? 1 : 0);

  const std::size_t n = spec.n_states;
  const StateIndex terminal = n - 1;
  const double jump_reward = spec.beta * std::pow(spec.discount, static_cast<double>(n - 2));

  FiniteMdp mdp(n, n_actions, spec.discount);
  for (StateIndex s = 0; s + 1 < n; ++s) {
    mdp.set_transition(s, kJumpAction, {{terminal, 1.0}});
    mdp.set_reward(s, kJumpAction, jump_reward);
    for (std::size_t w = 0; w < walks; ++w) {
      mdp.set_transition(s, kWalkAction + w, {{s + 1, 1.0}});
      mdp.set_reward(s, kWalkAction + w, s + 1 == terminal ? 1.0 : 0.0);
    }
    if (spec.cliff) {
      mdp.set_transition(s, n_actions - 1, {{terminal, 1.0}});
      mdp.set_reward(s, n_actions - 1, 0.0);
    }
  }
  mdp.set_terminal(terminal, true);
  std::vector<double> p0(n, 0.0);
  p0[0] = 1.0;
  mdp.set_initial_distribution(std::move(p0));
  mdp.validate();
  return mdp;
}

FiniteMdp make_bandit(std::span<const double> rewards, double discount) {
  FiniteMdp mdp(1, rewards.size(), discount);
  for (ActionIndex a = 0; a < rewards.size(); ++a) {
    mdp.set_transition(0, a, {{0, 1.0}});
    mdp.set_reward(0, a, rewards[a]);
  }
  mdp.set_initial_distribution({1.0});
  mdp.validate();
  return mdp;
}

PerformanceScale::PerformanceScale(double low_objective, double high_objective)
    : low(low_objective), high(high_objective) {
  if (!(high > low)) throw ConfigError("reference policies have no performance gap");
}

double normalized_performance(const FiniteMdp& mdp, const Policy& pi, const Policy& low_ref,
                              const Policy& high_ref) {
  const PerformanceScale scale(objective(mdp, low_ref), objective(mdp, high_ref));
  return scale(objective(mdp, pi));
}

}  // namespace pulab
