#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pulab/mdp.hpp"
#include "pulab/table.hpp"

namespace pulab {

struct Softmax {
  friend bool operator==(const Softmax&, const Softmax&) = default;
};

/// pi(a) = |theta_a|^p / ||theta||_p^p
struct Escort {
  double p = 2.0;
  friend bool operator==(const Escort&, const Escort&) = default;
};

/// pi(a) = theta_a, rows kept on the simplex by projection.
struct Direct {
  friend bool operator==(const Direct&, const Direct&) = default;
};

using Parametrization = std::variant<Softmax, Escort, Direct>;

std::string to_string(const Parametrization& kind);

struct PolicyParams {
  Table theta;
  Parametrization kind;

  std::size_t n_states() const { return theta.rows(); }
  std::size_t n_actions() const { return theta.cols(); }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Parameters realizing the uniform policy: zeros (softmax), ones (escort), 1/|A| (direct).
PolicyParams uniform_params(const Parametrization& kind, std::size_t n_states, std::size_t n_actions);

/// Policy of one row of parameters, written into `out` (same length).
void row_policy(const Parametrization& kind, std::span<const double> theta, std::span<double> out);

Policy policy_of(const PolicyParams& params);

/// Jacobian of one state's policy row: entry (a, w) = d pi(a|s) / d theta_{s,w}.
using TabularGradient = Table;

/// Analytic Jacobian at state s. The escort sign factor uses sign(0) = +1.
TabularGradient policy_gradient(const PolicyParams& params, StateIndex s);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_simplex(std::span<const double> x);

/// In-place variant of project_simplex.
void project_simplex_in_place(std::span<double> x);

}  // namespace pulab
