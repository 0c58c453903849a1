#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "pulab/mdp.hpp"
#include "pulab/parametrization.hpp"
#include "pulab/table.hpp"

namespace pulab {

/// Policy gradient on a softmax parametrization.
struct PgSm {
  friend bool operator==(const PgSm&, const PgSm&) = default;
};
/// Policy gradient on an escort parametrization with exponent p.
struct PgEs {
  double p = 2.0;
  friend bool operator==(const PgEs&, const PgEs&) = default;
};
/// Policy gradient on the direct parametrization followed by simplex projection.
struct Di {
  friend bool operator==(const Di&, const Di&) = default;
};
/// Cross-entropy towards the q-greedy action, softmax parametrization.
struct Ce {
  friend bool operator==(const Ce&, const Ce&) = default;
};
/// Modified cross-entropy: every non-greedy action is penalized by the same amount.
struct Mce {
  friend bool operator==(const Mce&, const Mce&) = default;
};

using UpdateKind = std::variant<PgSm, PgEs, Di, Ce, Mce>;

struct UpdateRule {
  UpdateKind kind;
  double eta = 1.0;
};

/// Short names used on the command line and in CSV files: pg-sm, pg-es, di, ce, mce.
std::string_view rule_name(const UpdateKind& kind);
/// Inverse of rule_name; throws ConfigError on an unknown name.
UpdateKind parse_rule(std::string_view name, double escort_p = 2.0);

/// The parametrization a rule operates on.
Parametrization parametrization_for(const UpdateKind& kind);

/// Throws ConfigError unless `params` uses the parametrization the rule expects.
void check_compatible(const UpdateKind& kind, const PolicyParams& params);

/// Lowest index among the maximizers.
ActionIndex argmax_action(std::span<const double> q_row);

/// Applies one rule to a single parameter row with weight = eta * d(s).
/// A zero weight leaves the row bit-identical.
void update_row(const UpdateKind& kind, const Parametrization& param_kind, std::span<double> theta_row,
                std::span<const double> q_row, double weight);

/// Whole-table update theta' = U(theta, d, q, eta).
PolicyParams apply_update(const UpdateKind& kind, const PolicyParams& params, std::span<const double> d,
                          const Table& q, double eta);

/// Update restricted to state s with d(s) = 1 driven by a critic row.
PolicyParams expected_actor_update(const UpdateKind& kind, const PolicyParams& params, StateIndex s,
                                   std::span<const double> q_row, double eta);

}  // namespace pulab
