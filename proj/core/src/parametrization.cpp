#include "pulab/parametrization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "pulab/errors.hpp"

namespace pulab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kDirectRowTol = 1e-12;

double sign_or_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

void softmax_row(std::span<const double> theta, std::span<double> out) {
  const double top = *std::max_element(theta.begin(), theta.end());
  double z = 0.0;
  for (std::size_t a = 0; a < theta.size(); ++a) {
    out[a] = std::exp(theta[a] - top);
    z += out[a];
  }
  for (double& x : out) x /= z;
}

void escort_row(double p, std::span<const double> theta, std::span<double> out) {
  double z = 0.0;
  for (std::size_t a = 0; a < theta.size(); ++a) {
    out[a] = std::pow(std::abs(theta[a]), p);
    z += out[a];
  }
  if (!(z > 0.0)) throw DegenerateParams("escort row is the zero vector");
  for (double& x : out) x /= z;
}

void direct_row(std::span<const double> theta, std::span<double> out) {
  double total = 0.0;
  for (std::size_t a = 0; a < theta.size(); ++a) {
    if (theta[a] < 0.0) throw DegenerateParams("direct row has a negative entry");
    out[a] = theta[a];
    total += theta[a];
  }
  if (std::abs(total - 1.0) > kDirectRowTol) throw DegenerateParams("direct row is off the simplex");
}

}  // namespace

std::string to_string(const Parametrization& kind) {
  return std::visit(Overloaded{
                        [](const Softmax&) { return std::string("softmax"); },
                        [](const Escort& e) { return "escort(p=" + std::to_string(e.p) + ")"; },
                        [](const Direct&) { return std::string("direct"); },
                    },
                    kind);
}

PolicyParams uniform_params(const Parametrization& kind, std::size_t n_states, std::size_t n_actions) {
  if (const auto* e = std::get_if<Escort>(&kind); e && !(e->p > 0.0))
    throw ConfigError("escort exponent p must be positive");
  const double fill = std::visit(Overloaded{
                                     [](const Softmax&) { return 0.0; },
                                     [](const Escort&) { return 1.0; },
                                     [&](const Direct&) { return 1.0 / static_cast<double>(n_actions); },
                                 },
                                 kind);
  return PolicyParams{Table(n_states, n_actions, fill), kind};
}

void row_policy(const Parametrization& kind, std::span<const double> theta, std::span<double> out) {
  std::visit(Overloaded{
                 [&](const Softmax&) { softmax_row(theta, out); },
                 [&](const Escort& e) { escort_row(e.p, theta, out); },
                 [&](const Direct&) { direct_row(theta, out); },
             },
             kind);
}

Policy policy_of(const PolicyParams& params) {
  Policy pi{Table(params.n_states(), params.n_actions())};
  for (StateIndex s = 0; s < params.n_states(); ++s) row_policy(params.kind, params.theta.row(s), pi.probs.row(s));
  return pi;
}

TabularGradient policy_gradient(const PolicyParams& params, StateIndex s) {
  const std::size_t n = params.n_actions();
  const auto theta = params.theta.row(s);
  std::vector<double> pi(n);
  row_policy(params.kind, theta, pi);

  TabularGradient jac(n, n, 0.0);
  std::visit(Overloaded{
                 [&](const Softmax&) {
                   for (std::size_t a = 0; a < n; ++a)
                     for (std::size_t w = 0; w < n; ++w) jac(a, w) = pi[a] * ((a == w ? 1.0 : 0.0) - pi[w]);
                 },
                 [&](const Escort& e) {
                   double norm_pp = 0.0;
                   for (double x : theta) norm_pp += std::pow(std::abs(x), e.p);
                   for (std::size_t w = 0; w < n; ++w) {
                     // d|theta_w|^p / d theta_w divided by the normalizer
                     const double scale =
                         sign_or_plus(theta[w]) * e.p * std::pow(std::abs(theta[w]), e.p - 1.0) / norm_pp;
                     for (std::size_t a = 0; a < n; ++a) jac(a, w) = scale * ((a == w ? 1.0 : 0.0) - pi[a]);
                   }
                 },
                 [&](const Direct&) {
                   for (std::size_t a = 0; a < n; ++a) jac(a, a) = 1.0;
                 },
             },
             params.kind);
  return jac;
}

void project_simplex_in_place(std::span<double> x) {
  if (x.empty()) return;
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("project_simplex: non-finite entry");

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) threshold = candidate;
  }
  for (double& v : x) v = std::max(v - threshold, 0.0);
}

std::vector<double> project_simplex(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  project_simplex_in_place(out);
  return out;
}

}  // namespace pulab
