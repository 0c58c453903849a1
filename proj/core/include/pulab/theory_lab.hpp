#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pulab/mdp.hpp"
#include "pulab/parametrization.hpp"
#include "pulab/policy_updates.hpp"

namespace pulab {

/// Direction in which a theorem bound constrains the measured count.
enum class BoundKind { Lower, Exact, Upper };

std::string to_string(BoundKind kind);

enum class LearningSchedule { Constant, Decaying };

std::string to_string(LearningSchedule schedule);
/// "constant" or "decaying"; throws ConfigError otherwise.
LearningSchedule parse_schedule(const std::string& name);

struct UnlearnReport {
  UpdateKind rule;
  double eta = 0.0;  // eta, or eta_1 for the decaying schedule
  LearningSchedule schedule = LearningSchedule::Constant;
  std::int64_t n = 0;
  /// Opposite updates until pi(a1) <= pi_0(a1); equals the budget when censored.
  std::int64_t n_prime = 0;
  bool censored = false;
  /// Bound as stated (real valued).
  double bound = 0.0;
  /// Value actually compared against: ceil(bound) for the constant-schedule upper bound.
  double bound_checked = 0.0;
  BoundKind bound_kind = BoundKind::Upper;
  bool violated = false;
};

/// Single state, two actions, uniform start. n updates with q = (1, 0), then
/// updates with q = (0, 1) until pi(a1) <= pi_0(a1). The decaying schedule
/// uses eta_t = eta_1 / sqrt(t) with t running over both phases.
UnlearnReport run_unlearning(const UpdateKind& rule, double eta, std::int64_t n, LearningSchedule schedule,
                             std::int64_t budget = 10'000'000);

/// Bound attached to an unlearning run (lower for pg-*, exact for di with a constant eta, upper otherwise).
double unlearning_bound(const UpdateKind& rule, double eta, std::int64_t n, LearningSchedule schedule);

struct DominoReport {
  UpdateKind rule;
  double eta = 0.0;
  std::size_t chain_length = 0;
  /// Steps until pi_t(a2|s_1) > pi_0(a2|s_1); equals the budget when censored.
  std::int64_t steps = 0;
  bool censored = false;
  double bound = 0.0;
  BoundKind bound_kind = BoundKind::Upper;
  bool violated = false;
};

/// Chain of binary decisions s_1 .. s_S updated synchronously with d = 1.
/// q(s_S) = (0, 1); q(s_k) = (1, 0) while pi_t(a2|s_{k+1}) <= pi_0(a2|s_{k+1}), (0, 1) afterwards.
DominoReport run_domino(const UpdateKind& rule, double eta, std::size_t chain_length,
                        std::int64_t budget = std::int64_t{1} << 24);

/// Lower bound 2^(S-1) for pg-*, 1 + (S-1)/eta for di, 32 e^(8 eta + 3) / eta^3 (S-1) ln(S-1)
/// for ce/mce (infinite when S < 3, where the logarithm vanishes).
double domino_bound(const UpdateKind& rule, double eta, std::size_t chain_length);

/// Tolerance under which two probability increments count as tied.
inline constexpr double kGravityTieTolerance = 1e-12;

/// True iff the largest probability increase of one update on a single-state
/// parameter row happens at the q-greedy action (ties count as satisfied).
bool check_gravity_condition(const UpdateKind& rule, const PolicyParams& params, std::span<const double> q_row,
                             double eta);

struct MonotonicityReport {
  std::vector<double> delta_v;
  bool monotone = true;
};

inline constexpr double kMonotonicityTolerance = 1e-10;

/// One apply_update driven by the exact q of the current policy; monotone iff
/// min_s (v_after - v_before)(s) >= -1e-10.
MonotonicityReport check_value_monotonicity(const FiniteMdp& mdp, const UpdateKind& rule, const PolicyParams& params,
                                            std::span<const double> d, double eta);

/// One line of a theory report: setting,rule,eta,n_or_S,measured,bound,violated.
struct TheoryRow {
  std::string setting;
  std::string rule;
  double eta = 0.0;
  std::int64_t n_or_s = 0;
  std::int64_t measured = 0;
  double bound = 0.0;
  bool violated = false;
};

TheoryRow to_row(const UnlearnReport& report);
TheoryRow to_row(const DominoReport& report);

void write_theory_csv(std::ostream& out, std::span<const TheoryRow> rows);

}  // namespace pulab
