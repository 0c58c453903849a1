#include <benchmark/benchmark.h>

#include <vector>

#include "pulab/environments.hpp"
#include "pulab/jekyll_hyde.hpp"
#include "pulab/mdp.hpp"
#include "pulab/parametrization.hpp"
#include "pulab/policy_updates.hpp"
#include "pulab/rng.hpp"

namespace {

using namespace pulab;

FiniteMdp random_mdp(std::size_t n_states) {
  RandomMdpSpec spec;
  spec.n_states = n_states;
  spec.seed = 11;
  return make_random_mdp(spec);
}

void BM_EvaluatePolicy(benchmark::State& state) {
  const FiniteMdp mdp = random_mdp(static_cast<std::size_t>(state.range(0)));
  const Policy pi = Policy::uniform(mdp.n_states(), mdp.n_actions());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(mdp, pi));
}
BENCHMARK(BM_EvaluatePolicy)->Arg(10)->Arg(100)->Arg(300);

void BM_OptimalValues(benchmark::State& state) {
  const FiniteMdp mdp = random_mdp(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_values(mdp));
}
BENCHMARK(BM_OptimalValues)->Arg(10)->Arg(100);

void BM_ProjectSimplex(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = 2.0 * rng.uniform01() - 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(project_simplex(x));
}
BENCHMARK(BM_ProjectSimplex)->Arg(4)->Arg(64)->Arg(1024);

template <class Rule>
void BM_ApplyUpdate(benchmark::State& state) {
  const FiniteMdp mdp = random_mdp(100);
  const UpdateKind rule = Rule{};
  const PolicyParams params = uniform_params(parametrization_for(rule), mdp.n_states(), mdp.n_actions());
  const auto values = evaluate_policy(mdp, policy_of(params));
  const std::vector<double> d(mdp.n_states(), 1.0 / static_cast<double>(mdp.n_states()));
  for (auto _ : state) benchmark::DoNotOptimize(apply_update(rule, params, d, values.q, 1.0));
}
BENCHMARK(BM_ApplyUpdate<PgSm>);
BENCHMARK(BM_ApplyUpdate<PgEs>);
BENCHMARK(BM_ApplyUpdate<Di>);
BENCHMARK(BM_ApplyUpdate<Ce>);
BENCHMARK(BM_ApplyUpdate<Mce>);

void BM_AgentStep(benchmark::State& state) {
  const FiniteMdp mdp = random_mdp(100);
  JekyllHydeAgent agent(mdp, Mce{}, make_schedules(ExplorationSetting::HiOffPol, 1.0), 5);
  for (auto _ : state) agent.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AgentStep);

}  // namespace

BENCHMARK_MAIN();
