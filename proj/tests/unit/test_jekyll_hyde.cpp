#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pulab/environments.hpp"
#include "pulab/errors.hpp"
#include "pulab/jekyll_hyde.hpp"

using namespace pulab;

namespace {

Schedules fixed(double epsilon, double offpolicy, double eta_actor = 1.0, double eta_critic = 0.1) {
  return {constant_schedule(epsilon), constant_schedule(offpolicy), eta_actor, eta_critic};
}

// One state, one action, straight into a terminal state.
FiniteMdp one_shot(double reward, double gamma) {
  FiniteMdp mdp(2, 1, gamma);
  mdp.set_transition(0, 0, {{1, 1.0}});
  mdp.set_reward(0, 0, reward);
  mdp.set_terminal(1, true);
  mdp.set_initial_distribution({1.0, 0.0});
  mdp.validate();
  return mdp;
}

}  // namespace

TEST_CASE("schedule tags expand to their exploration schedules") {
  const auto no = make_schedules(ExplorationSetting::NoExplo, 1.0);
  CHECK(no.epsilon(1) == 0.0);
  CHECK(no.offpolicy(1000) == 0.0);
  const auto low = make_schedules(ExplorationSetting::LowOffPol, 1.0);
  CHECK(low.epsilon(0) == 1.0);
  CHECK(low.epsilon(50) == 1.0);
  CHECK(low.epsilon(400) == doctest::Approx(0.5));
  CHECK(low.offpolicy(10000) == doctest::Approx(0.1));
  const auto hi = make_schedules(ExplorationSetting::HiOffPol, 1.0);
  CHECK(hi.epsilon(400) == doctest::Approx(0.5));
  CHECK(hi.offpolicy(1) == 0.5);
  CHECK(hi.offpolicy(1000000) == 0.5);
  CHECK(hi.eta_critic == 0.1);
  CHECK(constant_schedule(3.0)(0) == 1.0);
  CHECK(constant_schedule(-1.0)(0) == 0.0);
  CHECK(parse_setting("HiOffPol") == ExplorationSetting::HiOffPol);
  CHECK_THROWS_AS(parse_setting("hioffpol"), ConfigError);
}

TEST_CASE("no exploration keeps Jekyll in control") {
  const auto chain = make_chain({});
  JekyllHydeAgent agent(chain, Ce{}, fixed(0.0, 0.0), 1);
  for (int t = 0; t < 3000; ++t) {
    agent.step();
    CHECK(agent.in_control() == Personality::Jekyll);
  }
  CHECK(agent.hyde_buffer().empty());
  CHECK(agent.jekyll_buffer().size() == 3000);
}

TEST_CASE("full exploration hands every later episode to Hyde") {
  const auto chain = make_chain({});
  JekyllHydeAgent agent(chain, Ce{}, fixed(1.0, 0.0), 2);
  bool first_episode = true;
  for (int t = 0; t < 2000; ++t) {
    const auto tr = agent.behavior_step();
    if (!first_episode) CHECK(agent.hyde_buffer().back() == tr);
    if (tr.terminal) first_episode = false;
    CHECK(agent.in_control() == (first_episode ? Personality::Jekyll : Personality::Hyde));
    agent.update_step();
  }
  CHECK(!agent.hyde_buffer().empty());
}

TEST_CASE("visit counts match the behavior transitions") {
  const auto mdp = make_random_mdp({12, 3, 2, 5});
  JekyllHydeAgent agent(mdp, Mce{}, make_schedules(ExplorationSetting::HiOffPol, 1.0), 3);
  std::vector<std::int64_t> expected(12 * 3, 0);
  std::size_t buffered = 0;
  for (int t = 0; t < 5000; ++t) {
    const std::size_t before = agent.jekyll_buffer().size() + agent.hyde_buffer().size();
    const auto tr = agent.behavior_step();
    ++expected[tr.state * 3 + tr.action];
    buffered = agent.jekyll_buffer().size() + agent.hyde_buffer().size();
    CHECK(buffered == before + 1);
    agent.update_step();
  }
  CHECK(agent.visit_counts() == expected);
  CHECK(std::accumulate(expected.begin(), expected.end(), std::int64_t{0}) == 5000);
  CHECK(agent.step_counter() == 5000);
}

TEST_CASE("Hyde learns from the count-based bonus") {
  const auto mdp = one_shot(0.0, 0.9);
  JekyllHydeAgent agent(mdp, Ce{}, fixed(0.0, 0.0, 1.0, 0.1), 4);
  for (int k = 0; k < 4; ++k) agent.behavior_step();
  CHECK(agent.visit_counts()[0] == 4);
  agent.update_step();
  // bonus 1/sqrt(4) = 0.5, terminal successor, rate 0.1
  CHECK(agent.hyde_q()(0, 0) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("one-step critic update with full rate reproduces the reward") {
  const auto mdp = one_shot(0.7, 0.0);
  JekyllHydeAgent agent(mdp, Ce{}, fixed(0.0, 0.0, 1.0, 1.0), 5);
  agent.step();
  CHECK(agent.critic()(0, 0) == 0.7);
}

TEST_CASE("critic converges to the frozen actor's q") {
  // Two states, two actions, deterministic moves, no terminal state.
  FiniteMdp mdp(2, 2, 0.9);
  mdp.set_transition(0, 0, {{0, 1.0}});
  mdp.set_transition(0, 1, {{1, 1.0}});
  mdp.set_transition(1, 0, {{0, 1.0}});
  mdp.set_transition(1, 1, {{1, 1.0}});
  mdp.set_reward(0, 0, 1.0);
  mdp.set_reward(0, 1, 0.0);
  mdp.set_reward(1, 0, 0.5);
  mdp.set_reward(1, 1, 2.0);
  mdp.set_initial_distribution({1.0, 0.0});
  mdp.validate();

  JekyllHydeAgent agent(mdp, PgSm{}, fixed(0.0, 0.0, 0.0, 0.1), 6);
  for (int t = 0; t < 100000; ++t) agent.step();
  const auto exact = evaluate_policy(mdp, Policy::uniform(2, 2)).q;
  for (StateIndex s = 0; s < 2; ++s)
    for (ActionIndex a = 0; a < 2; ++a) CHECK(agent.critic()(s, a) == doctest::Approx(exact(s, a)).epsilon(1e-3));
  CHECK(agent.jekyll_policy() == Policy::uniform(2, 2));
}

TEST_CASE("identical seeds give identical agents and records") {
  const auto chain = make_chain({});
  const auto schedules = make_schedules(ExplorationSetting::HiOffPol, 1.0);
  JekyllHydeAgent a(chain, Di{}, schedules, 77);
  JekyllHydeAgent b(chain, Di{}, schedules, 77);
  for (int t = 0; t < 2000; ++t) {
    CHECK(a.behavior_step() == b.behavior_step());
    a.update_step();
    b.update_step();
  }
  CHECK(a.jekyll_params() == b.jekyll_params());
  CHECK(a.critic() == b.critic());
  CHECK(a.hyde_q() == b.hyde_q());

  const auto opt = optimal_values(chain).greedy;
  const PerformanceScale scale(objective(chain, Policy::constant(10, 2, kJumpAction)), objective(chain, opt));
  RunOptions options;
  options.total_steps = 3000;
  const auto r1 = run_agent(chain, {Mce{}, 1.0}, schedules, scale, options, 9);
  const auto r2 = run_agent(chain, {Mce{}, 1.0}, schedules, scale, options, 9);
  CHECK(r1 == r2);
}

TEST_CASE("run records checkpoints and the first crossing") {
  const auto chain = make_chain({});
  const auto opt = optimal_values(chain).greedy;
  const PerformanceScale scale(objective(chain, Policy::constant(10, 2, kJumpAction)), objective(chain, opt));
  const auto schedules = make_schedules(ExplorationSetting::HiOffPol, 1.0);

  RunOptions options;
  options.total_steps = 50000;
  options.checkpoint_interval = 100;
  options.threshold = 0.5;
  const auto record = run_agent(chain, {Mce{}, 1.0}, schedules, scale, options, 1);
  REQUIRE(!record.curve.empty());
  CHECK(record.curve.front().step == 0);
  CHECK(record.curve.size() == 501);
  for (const auto& p : record.curve) CHECK(std::isfinite(p.jbar));
  CHECK_FALSE(record.censored);
  CHECK(record.steps <= options.total_steps);
  CHECK(record.steps % 100 == 0);
  for (const auto& p : record.curve) {
    if (p.step < record.steps) CHECK(p.jbar < 0.5);
    if (p.step == record.steps) CHECK(p.jbar >= 0.5);
  }

  options.stop_at_threshold = true;
  const auto truncated = run_agent(chain, {Mce{}, 1.0}, schedules, scale, options, 1);
  CHECK(truncated.steps == record.steps);
  CHECK(truncated.curve.back().step == record.steps);

  options.total_steps = 200;
  options.stop_at_threshold = false;
  const auto short_run = run_agent(chain, {PgSm{}, 0.1}, schedules, scale, options, 1);
  CHECK(short_run.censored);
  CHECK(short_run.steps == 200);
}

TEST_CASE("agent rejects bad settings") {
  const auto chain = make_chain({});
  CHECK_THROWS_AS(JekyllHydeAgent(chain, Ce{}, Schedules{}, 0), ConfigError);
  CHECK_THROWS_AS(JekyllHydeAgent(chain, Ce{}, fixed(0.0, 0.0, 1.0, 0.0), 0), ConfigError);
  AgentOptions bad;
  bad.reset_probability = 1.5;
  CHECK_THROWS_AS(JekyllHydeAgent(chain, Ce{}, fixed(0.0, 0.0), 0, bad), ConfigError);
}
