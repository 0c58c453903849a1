#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pulab/errors.hpp"
#include "pulab/policy_updates.hpp"
#include "pulab/rng.hpp"
#include "test_support.hpp"

using namespace pulab;

namespace {

std::vector<double> step(const UpdateKind& kind, std::vector<double> theta, const std::vector<double>& q,
                         double weight) {
  update_row(kind, parametrization_for(kind), theta, q, weight);
  return theta;
}

std::vector<double> softmax(const std::vector<double>& theta) {
  std::vector<double> pi(theta.size());
  row_policy(Softmax{}, theta, pi);
  return pi;
}

const std::vector<UpdateKind> kAllRules{PgSm{}, PgEs{2.0}, Di{}, Ce{}, Mce{}};

}  // namespace

TEST_CASE("rule names round-trip") {
  for (const auto& kind : kAllRules) CHECK(parse_rule(rule_name(kind)) == kind);
  CHECK(std::get<PgEs>(parse_rule("pg-es", 3.0)).p == 3.0);
  CHECK_THROWS_AS(parse_rule("pg"), ConfigError);
  CHECK_THROWS_AS(parse_rule("pg-es", 0.0), ConfigError);
}

TEST_CASE("rules drive their own parametrization only") {
  CHECK(parametrization_for(PgSm{}) == Parametrization{Softmax{}});
  CHECK(parametrization_for(PgEs{3.0}) == Parametrization{Escort{3.0}});
  CHECK(parametrization_for(Di{}) == Parametrization{Direct{}});
  CHECK(parametrization_for(Mce{}) == Parametrization{Softmax{}});
  const auto softmax_params = uniform_params(Softmax{}, 1, 2);
  const std::vector<double> d{1.0};
  const Table q(1, 2, 0.0);
  CHECK_THROWS_AS(apply_update(Di{}, softmax_params, d, q, 1.0), ConfigError);
  CHECK_THROWS_AS(apply_update(PgEs{}, softmax_params, d, q, 1.0), ConfigError);
  CHECK_NOTHROW(apply_update(Ce{}, softmax_params, d, q, 1.0));
}

TEST_CASE("frozen single-row updates") {
  SUBCASE("pg-sm") {
    const auto t = step(PgSm{}, {0.0, 0.0}, {1.0, 0.0}, 1.0);
    CHECK(t[0] == doctest::Approx(0.25));
    CHECK(t[1] == doctest::Approx(-0.25));
    const auto t3 = step(PgSm{}, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1.0);
    CHECK(t3[0] == doctest::Approx(2.0 / 9.0));
    CHECK(t3[1] == doctest::Approx(-1.0 / 9.0));
  }
  SUBCASE("pg-es") {
    // |theta|_2^2 = 2, pi = (1/2, 1/2): step = 2 * 1 / 2 * adv = adv
    const auto t = step(PgEs{2.0}, {1.0, 1.0}, {1.0, 0.0}, 1.0);
    CHECK(t[0] == doctest::Approx(1.5));
    CHECK(t[1] == doctest::Approx(0.5));
    const auto neg = step(PgEs{2.0}, {-1.0, 1.0}, {1.0, 0.0}, 1.0);
    CHECK(neg[0] == doctest::Approx(-1.5));
  }
  SUBCASE("di") {
    // (0.6, 0.5) loses 0.05 on each coordinate
    const auto t = step(Di{}, {0.5, 0.5}, {1.0, 0.0}, 0.1);
    CHECK(t[0] == doctest::Approx(0.55));
    CHECK(t[1] == doctest::Approx(0.45));
    const auto sat = step(Di{}, {0.5, 0.5}, {1.0, 0.0}, 1.0);
    CHECK(sat == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("ce") {
    const auto t = step(Ce{}, {std::log(2.0), 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0);
    CHECK(t[0] == doctest::Approx(std::log(2.0) - 0.5));
    CHECK(t[1] == doctest::Approx(0.75));
    CHECK(t[2] == doctest::Approx(-0.25));
    const auto prop = step(Ce{}, {10.0, 0.0, 0.0}, {0.99, 1.0, 0.0}, 1.0);
    CHECK(prop[0] == doctest::Approx(9.0).epsilon(1e-3));
    CHECK(prop[1] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(prop[2] == doctest::Approx(0.0).epsilon(1e-3).scale(1.0));
  }
  SUBCASE("mce") {
    const auto t = step(Mce{}, {std::log(2.0), 0.0, 0.0}, {0.0, 1.0, 0.0}, 1.0);
    CHECK(t[0] == doctest::Approx(std::log(2.0) - 0.375));
    CHECK(t[1] == doctest::Approx(0.75));
    CHECK(t[2] == doctest::Approx(-0.375));
  }
}

TEST_CASE("constant q rows") {
  const std::vector<double> flat{0.3, 0.3, 0.3};
  const std::vector<double> theta{0.2, -0.4, 1.0};
  const std::vector<double> escort_theta{0.5, 1.0, 2.0};
  const auto pg = step(PgSm{}, theta, flat, 1.0);
  const auto es = step(PgEs{}, escort_theta, flat, 1.0);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(pg[a] == doctest::Approx(theta[a]).epsilon(1e-15).scale(1.0));
    CHECK(es[a] == doctest::Approx(escort_theta[a]).epsilon(1e-15).scale(1.0));
  }
  // Ce and Mce still push towards the lowest-index maximizer.
  CHECK(step(Ce{}, theta, flat, 1.0)[0] > theta[0]);
  CHECK(step(Mce{}, theta, flat, 1.0)[0] > theta[0]);
}

TEST_CASE("mce equals ce with two actions") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> theta{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
    const std::vector<double> q{rng.uniform01(), rng.uniform01()};
    const auto a = step(Ce{}, theta, q, 0.7);
    const auto b = step(Mce{}, theta, q, 0.7);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-15));
  }
}

TEST_CASE("zero weight leaves parameters bit-identical") {
  Rng rng(5);
  for (const auto& kind : kAllRules) {
    PolicyParams params = uniform_params(parametrization_for(kind), 3, 4);
    if (!std::holds_alternative<Di>(kind))
      for (auto& x : params.theta.data()) x = rng.uniform01() + 0.1;
    Table q(3, 4);
    for (auto& x : q.data()) x = rng.uniform01();
    const std::vector<double> d{0.0, 0.0, 0.0};
    CHECK(apply_update(kind, params, d, q, 5.0) == params);
    const std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(apply_update(kind, params, ones, q, 0.0) == params);
  }
}

TEST_CASE("expected actor update equals apply_update with an indicator") {
  Rng rng(7);
  for (const auto& kind : kAllRules) {
    PolicyParams params = uniform_params(parametrization_for(kind), 4, 3);
    if (!std::holds_alternative<Di>(kind))
      for (auto& x : params.theta.data()) x = 2.0 * rng.uniform01() + 0.1;
    Table q(4, 3);
    for (auto& x : q.data()) x = rng.uniform01();
    for (StateIndex s = 0; s < 4; ++s) {
      std::vector<double> d(4, 0.0);
      d[s] = 1.0;
      CHECK(expected_actor_update(kind, params, s, q.row(s), 0.8) == apply_update(kind, params, d, q, 0.8));
    }
  }
}

TEST_CASE("policy-gradient increments are odd in q") {
  Rng rng(11);
  for (const UpdateKind& kind : {UpdateKind{PgSm{}}, UpdateKind{PgEs{2.0}}}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.uniform_index(4);
      std::vector<double> theta(n), q(n), neg(n);
      for (std::size_t a = 0; a < n; ++a) {
        theta[a] = 2.0 * rng.uniform01() + 0.1;
        q[a] = rng.uniform01();
        neg[a] = -q[a];
      }
      const auto up = step(kind, theta, q, 0.9);
      const auto down = step(kind, theta, neg, 0.9);
      for (std::size_t a = 0; a < n; ++a)
        CHECK((up[a] - theta[a]) + (down[a] - theta[a]) == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
    }
  }
}

TEST_CASE("policy-gradient increments follow the jacobian") {
  Rng rng(13);
  for (const UpdateKind& kind : {UpdateKind{PgSm{}}, UpdateKind{PgEs{2.0}}, UpdateKind{PgEs{3.0}}}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.uniform_index(4);
      PolicyParams params = uniform_params(parametrization_for(kind), 1, n);
      for (auto& x : params.theta.data()) x = 3.0 * rng.uniform01() - 1.5;
      std::vector<double> q(n);
      for (auto& x : q) x = rng.uniform01();
      const auto jac = policy_gradient(params, 0);
      const double w = 0.6;
      const auto next = expected_actor_update(kind, params, 0, q, w);
      for (std::size_t col = 0; col < n; ++col) {
        double expected = 0.0;
        for (std::size_t a = 0; a < n; ++a) expected += q[a] * jac(a, col);
        CHECK(next.theta(0, col) - params.theta(0, col) == doctest::Approx(w * expected).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("updates are invariant to shifting q") {
  Rng rng(17);
  for (const auto& kind : kAllRules) {
    for (int trial = 0; trial < 100; ++trial) {
      PolicyParams params = uniform_params(parametrization_for(kind), 1, 3);
      if (std::holds_alternative<Di>(kind)) {
        const auto p = testing::random_simplex_point(rng, 3);
        std::copy(p.begin(), p.end(), params.theta.row(0).begin());
      } else {
        for (auto& x : params.theta.data()) x = 2.0 * rng.uniform01() + 0.1;
      }
      std::vector<double> q(3), shifted(3);
      for (std::size_t a = 0; a < 3; ++a) shifted[a] = (q[a] = rng.uniform01()) + 0.75;
      const auto a = expected_actor_update(kind, params, 0, q, 0.5);
      const auto b = expected_actor_update(kind, params, 0, shifted, 0.5);
      for (std::size_t i = 0; i < 3; ++i) CHECK(a.theta(0, i) == doctest::Approx(b.theta(0, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mce conserves the row sum and lowers every other action") {
  Rng rng(19);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(5);
    std::vector<double> theta(n), q(n);
    for (std::size_t a = 0; a < n; ++a) theta[a] = 6.0 * rng.uniform01() - 3.0, q[a] = rng.uniform01();
    const auto next = step(Mce{}, theta, q, 0.1 + 5.0 * rng.uniform01());
    CHECK(std::accumulate(next.begin(), next.end(), 0.0) ==
          doctest::Approx(std::accumulate(theta.begin(), theta.end(), 0.0)).epsilon(1e-12).scale(1.0));
    const auto before = softmax(theta);
    const auto after = softmax(next);
    const ActionIndex target = argmax_action(q);
    for (std::size_t a = 0; a < n; ++a)
      if (a != target) CHECK(after[a] <= before[a] + 1e-15);
  }
}

TEST_CASE("direct rows stay on the simplex and compose linearly before saturation") {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(5);
    const auto theta = testing::random_simplex_point(rng, n);
    std::vector<double> q(n);
    for (auto& x : q) x = 4.0 * rng.uniform01() - 2.0;
    const auto next = step(Di{}, theta, q, 3.0 * rng.uniform01());
    CHECK(std::accumulate(next.begin(), next.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : next) CHECK(x >= 0.0);
  }
  // Interior path: three steps of 0.01 equal one step of 0.03.
  const std::vector<double> theta{0.4, 0.35, 0.25};
  const std::vector<double> q{1.0, 0.2, -0.5};
  auto many = theta;
  for (int k = 0; k < 3; ++k) many = step(Di{}, many, q, 0.01);
  const auto once = step(Di{}, theta, q, 0.03);
  for (std::size_t a = 0; a < 3; ++a) CHECK(many[a] == doctest::Approx(once[a]).epsilon(1e-12));
  // A huge step lands on the vertex of the maximizer.
  CHECK(step(Di{}, theta, q, 1e6) == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("argmax scan") {
  const std::vector<double> prop{0.99, 1.0, 0.0};
  CHECK(argmax_action(prop) == 1);
  const std::vector<double> tie{1.0, 1.0};
  CHECK(argmax_action(tie) == 0);
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(1 + rng.uniform_index(8));
    for (auto& x : q) x = std::floor(4.0 * rng.uniform01());
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.size(); ++a)
      if (q[a] > q[best]) best = a;
    CHECK(argmax_action(q) == best);
  }
}
