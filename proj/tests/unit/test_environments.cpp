#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "pulab/environments.hpp"
#include "pulab/errors.hpp"
#include "pulab/mdp_json.hpp"

using namespace pulab;

namespace {

// Kolmogorov-Smirnov statistic of a sample against U[0, 1].
double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - xs[i]);
    d = std::max(d, xs[i] - static_cast<double>(i) / n);
  }
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("random MDP layout") {
  const auto mdp = make_random_mdp({100, 4, 2, 42});
  CHECK(mdp.n_states() == 100);
  CHECK(mdp.n_actions() == 4);
  CHECK(mdp.discount() == 0.99);
  CHECK(mdp.initial_distribution()[0] == 1.0);
  CHECK_FALSE(mdp.has_terminal_states());
  for (StateIndex s = 0; s < 100; ++s)
    for (ActionIndex a = 0; a < 4; ++a) {
      const auto succ = mdp.successors(s, a);
      CHECK(succ.size() >= 1);
      CHECK(succ.size() <= 2);
      CHECK(mdp.reward(s, a) >= 0.0);
      CHECK(mdp.reward(s, a) < 1.0);
    }
  CHECK_NOTHROW(mdp.validate());
}

TEST_CASE("random MDPs are seed-deterministic") {
  CHECK(make_random_mdp({20, 3, 2, 7}) == make_random_mdp({20, 3, 2, 7}));
  CHECK_FALSE(make_random_mdp({20, 3, 2, 7}) == make_random_mdp({20, 3, 2, 8}));
}

TEST_CASE("random MDP probabilities and rewards are uniform") {
  std::vector<double> first_mass;
  std::vector<double> rewards;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mdp = make_random_mdp({100, 4, 2, seed});
    for (StateIndex s = 0; s < 100; ++s)
      for (ActionIndex a = 0; a < 4; ++a) {
        const auto succ = mdp.successors(s, a);
        if (succ.size() == 2) first_mass.push_back(succ[0].probability);
        rewards.push_back(mdp.reward(s, a));
      }
  }
  // 1% critical value of the KS statistic is about 1.63 / sqrt(n).
  CHECK(ks_uniform(first_mass) < 1.63 / std::sqrt(static_cast<double>(first_mass.size())));
  CHECK(ks_uniform(rewards) < 1.63 / std::sqrt(static_cast<double>(rewards.size())));
}

TEST_CASE("random MDP spec validation") {
  CHECK_THROWS_AS(make_random_mdp({10, 2, 0, 0}), ConfigError);
  CHECK_THROWS_AS(make_random_mdp({10, 2, 11, 0}), ConfigError);
  CHECK_THROWS_AS(make_random_mdp({0, 2, 1, 0}), ConfigError);
}

TEST_CASE("chain values") {
  const auto chain = make_chain({});
  const double g8 = std::pow(0.99, 8);
  const auto walk = Policy::constant(10, 2, kWalkAction);
  const auto jump = Policy::constant(10, 2, kJumpAction);
  CHECK(evaluate_policy(chain, walk).v[0] == doctest::Approx(g8).epsilon(1e-12));
  CHECK(g8 == doctest::Approx(0.922745).epsilon(1e-6));
  CHECK(objective(chain, jump) == doctest::Approx(0.8 * g8).epsilon(1e-12));
  CHECK(chain.reward(0, kJumpAction) == doctest::Approx(0.8 * g8));
  const auto opt = optimal_values(chain);
  for (StateIndex s = 0; s + 1 < 10; ++s) CHECK(opt.greedy(s, kWalkAction) == 1.0);
  CHECK(opt.values.v[0] == doctest::Approx(g8).epsilon(1e-9));
  const auto q = evaluate_policy(chain, walk).q;
  CHECK(q(0, kJumpAction) / q(0, kWalkAction) == doctest::Approx(0.8));
  CHECK(chain.is_terminal(9));
}

TEST_CASE("cliff and duplicate variants") {
  ChainSpec cliff_spec;
  cliff_spec.n_states = 7;
  cliff_spec.cliff = true;
  const auto cliff = make_chain(cliff_spec);
  CHECK(cliff.n_actions() == 3);
  CHECK(cliff.reward(3, 2) == 0.0);
  CHECK(cliff.successors(3, 2)[0].state == 6);
  const auto opt = optimal_values(cliff);
  for (StateIndex s = 0; s + 1 < 7; ++s) CHECK(opt.greedy(s, 2) == 0.0);

  ChainSpec dup_spec;
  dup_spec.duplicate_optimal = true;
  const auto dup = make_chain(dup_spec);
  CHECK(dup.n_actions() == 4);
  const auto v = evaluate_policy(dup, Policy::uniform(10, 4)).q;
  CHECK(v(2, 1) == v(2, 2));
  CHECK(v(2, 2) == v(2, 3));

  ChainSpec bad;
  bad.beta = 1.0;
  CHECK_THROWS_AS(make_chain(bad), ConfigError);
  bad.beta = 0.5;
  bad.n_states = 2;
  CHECK_THROWS_AS(make_chain(bad), ConfigError);
}

TEST_CASE("bandit and normalization") {
  const std::vector<double> r{1.0, 0.0};
  const auto bandit = make_bandit(r, 0.9);
  const auto opt = optimal_values(bandit);
  CHECK(opt.greedy(0, 0) == 1.0);
  CHECK(opt.values.v[0] == doctest::Approx(10.0).epsilon(1e-9));

  const auto chain = make_chain({});
  const auto jump = Policy::constant(10, 2, kJumpAction);
  const auto best = optimal_values(chain).greedy;
  CHECK(normalized_performance(chain, jump, jump, best) == doctest::Approx(0.0));
  CHECK(normalized_performance(chain, best, jump, best) == doctest::Approx(1.0));
  CHECK_THROWS_AS(normalized_performance(chain, jump, best, best), ConfigError);
}

TEST_CASE("golden chain matches the hand-written JSON") {
  const auto golden = mdp_from_json(read_file(std::string(PULAB_TEST_DATA_DIR) + "/chain4.json"));
  ChainSpec spec;
  spec.n_states = 4;
  const auto built = make_chain(spec);
  REQUIRE(golden.n_states() == built.n_states());
  REQUIRE(golden.n_actions() == built.n_actions());
  CHECK(golden.discount() == built.discount());
  for (StateIndex s = 0; s < 4; ++s) {
    CHECK(golden.is_terminal(s) == built.is_terminal(s));
    CHECK(golden.initial_distribution()[s] == built.initial_distribution()[s]);
    for (ActionIndex a = 0; a < 2; ++a) {
      CHECK(golden.reward(s, a) == doctest::Approx(built.reward(s, a)).epsilon(1e-15));
      const auto gs = golden.successors(s, a);
      const auto bs = built.successors(s, a);
      if (built.is_terminal(s)) continue;
      REQUIRE(gs.size() == bs.size());
      for (std::size_t k = 0; k < gs.size(); ++k) CHECK(gs[k] == bs[k]);
    }
  }
}

TEST_CASE("MDP JSON round-trips exactly") {
  const auto mdp = make_random_mdp({15, 3, 3, 4});
  CHECK(mdp_from_json(mdp_to_json(mdp)) == mdp);
  const auto chain = make_chain({});
  CHECK(mdp_from_json(mdp_to_json(chain)) == chain);
  CHECK_THROWS_AS(mdp_from_json("{\"n_states\": 2}"), InvalidMdp);
  CHECK_THROWS_AS(mdp_from_json("not json"), InvalidMdp);
}
