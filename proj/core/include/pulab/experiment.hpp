#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pulab/environments.hpp"
#include "pulab/jekyll_hyde.hpp"
#include "pulab/policy_updates.hpp"

namespace pulab {

struct RandomMdpEnv {
  RandomMdpSpec spec;
  /// When unset every run draws its own MDP from the run seed.
  std::optional<std::uint64_t> mdp_seed;
};

struct ChainEnv {
  ChainSpec spec;
};

using EnvironmentSpec = std::variant<RandomMdpEnv, ChainEnv>;

/// "random-mdp", "chain" or "cliff".
std::string env_name(const EnvironmentSpec& env);

/// A schedule that can be written to and read from a config file.
struct ScheduleSpec {
  enum class Shape { Constant, InverseSqrt } shape = Shape::Constant;
  double value = 0.0;  // constant value, or the scale of min{1, scale / sqrt t}

  ScheduleFn build() const;
};

struct ExplicitSchedules {
  ScheduleSpec epsilon;
  ScheduleSpec offpolicy;
};

struct ExperimentConfig {
  EnvironmentSpec env = ChainEnv{};
  std::variant<ExplorationSetting, ExplicitSchedules> exploration = ExplorationSetting::HiOffPol;
  std::vector<std::string> rules{"pg-sm", "pg-es", "di", "ce", "mce"};
  std::vector<double> etas{0.1, 1.0, 10.0};
  std::int64_t total_steps = 10000;
  std::int64_t checkpoint_interval = 100;
  /// Defaults to 0.95 on random MDPs and 0.5 on chain and cliff.
  double threshold = 0.5;
  std::size_t n_seeds = 20;
  std::uint64_t base_seed = 0;
  double escort_p = 2.0;
  double critic_lr = 0.1;
  bool stop_at_threshold = false;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
  std::string setting_name() const;
};

/// Strict parse: unknown keys and ill-typed values raise ConfigError.
ExperimentConfig config_from_json(const std::string& text);
/// Reads and parses a JSON config file; throws ConfigError when unreadable.
ExperimentConfig load_config(const std::string& path);
/// Pretty-printed JSON that config_from_json parses back to an equal config.
std::string config_to_json(const ExperimentConfig& config);

/// Environment instance of one run together with its normalization.
struct PreparedEnvironment {
  FiniteMdp mdp;
  PerformanceScale scale;
};

/// Random MDPs are normalized between the uniform and the optimal policy,
/// chain and cliff between always-jump and the optimal policy.
PreparedEnvironment prepare_environment(const EnvironmentSpec& env, std::uint64_t run_seed);

struct SweepCell {
  std::string rule;
  double eta = 0.0;
  std::size_t seed_index = 0;
};

/// Grid in run-index order: rules, then etas, then seeds.
std::vector<SweepCell> sweep_cells(const ExperimentConfig& config);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// One record per (rule, eta, seed) with run seed = base_seed + seed index,
/// computed on `threads` workers and returned in run-index order.
std::vector<RunRecord> run_sweep(const ExperimentConfig& config, std::size_t threads = 1,
                                 const ProgressFn& progress = {});

struct SummaryRow {
  std::string setting;
  std::string env;
  std::string rule;
  double eta = 0.0;
  std::size_t runs = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double censored_fraction = 0.0;
  /// Largest steps value seen in the cell (the censoring level when any run is censored).
  std::int64_t max_steps = 0;
};

/// Linear-interpolation quantile of an unsorted sample; p in [0, 1].
double quantile(std::vector<double> values, double p);

/// Per (setting, env, rule, eta) in order of first appearance. Censored runs
/// count with steps = total_steps. Throws std::invalid_argument on empty input.
std::vector<SummaryRow> aggregate(std::span<const RunRecord> records);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace pulab
