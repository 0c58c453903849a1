#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "pulab/mdp.hpp"

namespace pulab {

inline constexpr double kBenchmarkDiscount = 0.99;

struct RandomMdpSpec {
  std::size_t n_states = 100;
  std::size_t n_actions = 4;
  std::size_t connectivity = 2;
  std::uint64_t seed = 0;
};

/// Each (s,a) connects to `connectivity` successors drawn uniformly with
/// replacement; their probabilities are the segment lengths of a uniform
/// partition of [0,1]. Rewards r(s,a) ~ U[0,1], p0 = state 0, gamma = 0.99,
/// no terminal states. Repeated successors are merged.
FiniteMdp make_random_mdp(const RandomMdpSpec& spec);

struct ChainSpec {
  std::size_t n_states = 10;
  double beta = 0.8;
  bool duplicate_optimal = false;
  /// Number of copies of the walk action when duplicate_optimal is set.
  std::size_t walk_copies = 3;
  bool cliff = false;
  double discount = kBenchmarkDiscount;
};

/// Deterministic chain s0 .. s_{n-1}, s_{n-1} terminal.
///   action 0 (jump): any state -> terminal, reward beta * gamma^(n-2)
///   action 1 (walk): s_k -> s_{k+1}, reward 1 only when entering the terminal
///   action 2 (cliff only): -> terminal, reward 0
/// With duplicate_optimal the walk action is repeated `walk_copies` times
/// (occupying actions 1 .. walk_copies) before the optional cliff action.
FiniteMdp make_chain(const ChainSpec& spec);

/// Index of the jump action in chain/cliff MDPs.
inline constexpr ActionIndex kJumpAction = 0;
/// Index of the (first) walk action in chain/cliff MDPs.
inline constexpr ActionIndex kWalkAction = 1;

/// Single-state bandit with the given rewards; gamma defaults to 0 so v = sum_a pi(a) r(a).
FiniteMdp make_bandit(std::span<const double> rewards, double discount = 0.0);

/// (J(pi) - J(low)) / (J(high) - J(low)); throws ConfigError on a non-positive gap.
double normalized_performance(const FiniteMdp& mdp, const Policy& pi, const Policy& low_ref, const Policy& high_ref);

/// Precomputed reference objectives for repeated normalization.
struct PerformanceScale {
  double low = 0.0;
  double high = 1.0;

  PerformanceScale(double low_objective, double high_objective);
  double operator()(double objective) const { return (objective - low) / (high - low); }
};

}  // namespace pulab
