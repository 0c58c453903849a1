#pragma once

#include <stdexcept>
#include <string>

namespace pulab {

/// Malformed MDP: probabilities off the simplex, bad indices, discount out of range.
class InvalidMdp : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters that do not define a policy (e.g. an all-zero escort row).
class DegenerateParams : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// User-facing configuration problem: incompatible rule/parametrization,
/// unknown config keys, zero performance gap, etc.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pulab
