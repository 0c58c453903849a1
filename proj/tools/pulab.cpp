// pulab: sweeps, theory drivers and plots from the command line.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pulab/errors.hpp"
#include "pulab/experiment.hpp"
#include "pulab/records_csv.hpp"
#include "pulab/rng.hpp"
#include "pulab/svg_plot.hpp"
#include "pulab/theory_lab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitViolation = 2;

struct RunArgs {
  std::string config;
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> base_seed;
  std::string out = "results";
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
};

struct TheoryArgs {
  std::vector<std::string> rules{"pg-sm", "pg-es", "di", "ce", "mce"};
  std::vector<double> etas{0.1, 0.5, 1.0, 2.0};
  std::vector<std::int64_t> ns{10, 100, 1000, 10000};
  std::vector<std::size_t> states{3, 4, 5, 6, 7, 8};
  std::string schedule = "constant";
  std::string out;
  double escort_p = 2.0;
  std::int64_t budget = 0;
};

struct GravityArgs {
  std::vector<std::string> rules{"pg-sm", "pg-es", "di", "ce", "mce"};
  std::vector<double> etas{0.1, 1.0, 10.0};
  std::size_t runs = 10000;
  std::uint64_t seed = 0;
  double escort_p = 2.0;
};

struct PlotArgs {
  std::string runs;
  std::string out = "plot.svg";
  std::string title = "steps to threshold";
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

int cmd_run(const RunArgs& args) {
  pulab::ExperimentConfig config = pulab::load_config(args.config);
  if (args.seeds) config.n_seeds = *args.seeds;
  if (args.base_seed) config.base_seed = *args.base_seed;
  config.validate();

  pulab::ProgressFn progress;
  if (!args.quiet)
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << " runs" << (done == total ? "\n" : "") << std::flush;
    };
  const auto records = pulab::run_sweep(config, args.threads, progress);
  const auto summary = pulab::aggregate(records);

  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "runs.csv");
    pulab::write_runs_csv(out, records);
  }
  {
    auto out = open_output(dir / "curves.csv");
    pulab::write_curves_csv(out, records);
  }
  {
    auto out = open_output(dir / "summary.csv");
    pulab::write_summary_csv(out, summary);
  }
  {
    auto out = open_output(dir / "config.json");
    out << pulab::config_to_json(config) << '\n';
  }
  pulab::write_summary_csv(std::cout, summary);
  return kExitOk;
}

int emit_theory(const std::vector<pulab::TheoryRow>& rows, const std::string& out_path) {
  pulab::write_theory_csv(std::cout, rows);
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    pulab::write_theory_csv(out, rows);
  }
  for (const auto& r : rows)
    if (r.violated) return kExitViolation;
  return kExitOk;
}

int cmd_unlearn(const TheoryArgs& args) {
  const auto schedule = pulab::parse_schedule(args.schedule);
  std::vector<pulab::TheoryRow> rows;
  for (const auto& name : args.rules) {
    const auto rule = pulab::parse_rule(name, args.escort_p);
    for (double eta : args.etas)
      for (auto n : args.ns) {
        const auto report = args.budget > 0 ? pulab::run_unlearning(rule, eta, n, schedule, args.budget)
                                            : pulab::run_unlearning(rule, eta, n, schedule);
        rows.push_back(pulab::to_row(report));
      }
  }
  return emit_theory(rows, args.out);
}

int cmd_domino(const TheoryArgs& args) {
  std::vector<pulab::TheoryRow> rows;
  for (const auto& name : args.rules) {
    const auto rule = pulab::parse_rule(name, args.escort_p);
    for (double eta : args.etas)
      for (auto s : args.states) {
        const auto report = args.budget > 0 ? pulab::run_domino(rule, eta, s, args.budget)
                                            : pulab::run_domino(rule, eta, s);
        rows.push_back(pulab::to_row(report));
      }
  }
  return emit_theory(rows, args.out);
}

int cmd_gravity(const GravityArgs& args) {
  std::cout << "rule,eta,instances,satisfied,guaranteed\n";
  bool violated = false;
  for (const auto& name : args.rules) {
    const auto rule = pulab::parse_rule(name, args.escort_p);
    const bool guaranteed = std::holds_alternative<pulab::Di>(rule) || std::holds_alternative<pulab::Mce>(rule);
    for (double eta : args.etas) {
      pulab::Rng rng(args.seed);
      std::size_t satisfied = 0;
      for (std::size_t i = 0; i < args.runs; ++i) {
        const std::size_t n_actions = 2 + rng.uniform_index(5);
        auto params = pulab::uniform_params(pulab::parametrization_for(rule), 1, n_actions);
        auto row = params.theta.row(0);
        if (std::holds_alternative<pulab::Direct>(params.kind)) {
          for (auto& x : row) x = -std::log(1.0 - rng.uniform01());
          double total = 0.0;
          for (double x : row) total += x;
          for (auto& x : row) x /= total;
        } else {
          for (auto& x : row) x = 10.0 * rng.uniform01() - 5.0;
        }
        std::vector<double> q(n_actions);
        for (auto& x : q) x = rng.uniform01();
        satisfied += pulab::check_gravity_condition(rule, params, q, eta);
      }
      if (guaranteed && satisfied != args.runs) violated = true;
      std::cout << name << ',' << pulab::format_double(eta) << ',' << args.runs << ',' << satisfied << ','
                << (guaranteed ? 1 : 0) << '\n';
    }
  }
  return violated ? kExitViolation : kExitOk;
}

int cmd_plot(const PlotArgs& args) {
  std::ifstream in(args.runs);
  if (!in) throw pulab::ConfigError("cannot read '" + args.runs + "'");
  const auto records = pulab::read_runs_csv(in);
  const auto summary = pulab::aggregate(records);
  pulab::PlotOptions options;
  options.title = args.title;
  pulab::emit_plot(summary, args.out, options);
  return kExitOk;
}

void add_theory_options(CLI::App* cmd, TheoryArgs& args, bool with_n, bool with_states) {
  cmd->add_option("--rule", args.rules, "Update rules (pg-sm, pg-es, di, ce, mce)")->capture_default_str();
  cmd->add_option("--eta", args.etas, "Learning rates (eta_1 for the decaying schedule)")->capture_default_str();
  if (with_n) {
    cmd->add_option("--n", args.ns, "Forward update counts")->capture_default_str();
    cmd->add_option("--schedule", args.schedule, "constant or decaying")->capture_default_str();
  }
  if (with_states) cmd->add_option("--states", args.states, "Chain lengths")->capture_default_str();
  cmd->add_option("--out", args.out, "Also write the CSV report to this file");
  cmd->add_option("--escort-p", args.escort_p, "Escort exponent")->capture_default_str();
  cmd->add_option("--budget", args.budget, "Step budget before censoring (0 keeps the default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-update laboratory: actor-critic sweeps and unlearning experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a seeded sweep described by a JSON config");
  run->add_option("--config", run_args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", run_args.seeds, "Override the number of seeds");
  run->add_option("--base-seed", run_args.base_seed, "Override the base seed");
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--threads", run_args.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_flag("--quiet", run_args.quiet, "No progress output");

  TheoryArgs unlearn_args;
  auto* unlearn = app.add_subcommand("unlearn", "Unlearning setting: opposite updates needed to undo n updates");
  add_theory_options(unlearn, unlearn_args, true, false);

  TheoryArgs domino_args;
  domino_args.etas = {1.0};
  auto* domino = app.add_subcommand("domino", "Domino setting: synchronized flips along a chain of decisions");
  add_theory_options(domino, domino_args, false, true);

  GravityArgs gravity_args;
  auto* gravity = app.add_subcommand("gravity", "Gravity-well condition on random single-state instances");
  gravity->add_option("--rule", gravity_args.rules, "Update rules")->capture_default_str();
  gravity->add_option("--eta", gravity_args.etas, "Learning rates")->capture_default_str();
  gravity->add_option("--runs", gravity_args.runs, "Random instances per (rule, eta)")->capture_default_str();
  gravity->add_option("--seed", gravity_args.seed, "Random seed")->capture_default_str();
  gravity->add_option("--escort-p", gravity_args.escort_p, "Escort exponent")->capture_default_str();

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "Render runs.csv as an SVG of median steps against learning rate");
  plot->add_option("--runs", plot_args.runs, "runs.csv produced by `pulab run`")->required();
  plot->add_option("--out", plot_args.out, "SVG path")->capture_default_str();
  plot->add_option("--title", plot_args.title, "Plot title")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*unlearn) return cmd_unlearn(unlearn_args);
    if (*domino) return cmd_domino(domino_args);
    if (*gravity) return cmd_gravity(gravity_args);
    if (*plot) return cmd_plot(plot_args);
  } catch (const pulab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
