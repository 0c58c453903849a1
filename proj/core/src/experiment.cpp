#include "pulab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "pulab/errors.hpp"
#include "pulab/records_csv.hpp"

namespace pulab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const json& obj, const std::string& key, const std::string& where, T& target) {
  if (obj.contains(key)) target = get_field<T>(obj, key, where);
}

EnvironmentSpec parse_env(const json& obj) {
  const std::string where = "env";
  if (!obj.is_object()) throw ConfigError("env must be a JSON object");
  const auto type = get_field<std::string>(obj, "type", where);
  if (type == "random-mdp") {
    reject_unknown_keys(obj, {"type", "n_states", "n_actions", "connectivity", "mdp_seed"}, where);
    RandomMdpEnv env;
    read_optional(obj, "n_states", where, env.spec.n_states);
    read_optional(obj, "n_actions", where, env.spec.n_actions);
    read_optional(obj, "connectivity", where, env.spec.connectivity);
    if (obj.contains("mdp_seed")) env.mdp_seed = get_field<std::uint64_t>(obj, "mdp_seed", where);
    return env;
  }
  if (type == "chain" || type == "cliff") {
    reject_unknown_keys(obj, {"type", "n_states", "beta", "duplicate_optimal", "walk_copies", "discount"}, where);
    ChainEnv env;
    env.spec.cliff = type == "cliff";
    if (env.spec.cliff) env.spec.n_states = 7;
    read_optional(obj, "n_states", where, env.spec.n_states);
    read_optional(obj, "beta", where, env.spec.beta);
    read_optional(obj, "duplicate_optimal", where, env.spec.duplicate_optimal);
    read_optional(obj, "walk_copies", where, env.spec.walk_copies);
    read_optional(obj, "discount", where, env.spec.discount);
    return env;
  }
  throw ConfigError("unknown env type '" + type + "' (expected random-mdp, chain, cliff)");
}

ScheduleSpec parse_schedule_spec(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"type", "value", "scale"}, where);
  const auto type = get_field<std::string>(obj, "type", where);
  ScheduleSpec spec;
  if (type == "constant") {
    spec.shape = ScheduleSpec::Shape::Constant;
    spec.value = get_field<double>(obj, "value", where);
    if (obj.contains("scale")) throw ConfigError(where + ": constant schedules take 'value'");
  } else if (type == "inverse-sqrt") {
    spec.shape = ScheduleSpec::Shape::InverseSqrt;
    spec.value = get_field<double>(obj, "scale", where);
    if (obj.contains("value")) throw ConfigError(where + ": inverse-sqrt schedules take 'scale'");
  } else {
    throw ConfigError(where + ": unknown schedule type '" + type + "' (expected constant, inverse-sqrt)");
  }
  return spec;
}

json schedule_to_json(const ScheduleSpec& spec) {
  if (spec.shape == ScheduleSpec::Shape::Constant) return {{"type", "constant"}, {"value", spec.value}};
  return {{"type", "inverse-sqrt"}, {"scale", spec.value}};
}

Policy jump_policy(const FiniteMdp& mdp) { return Policy::constant(mdp.n_states(), mdp.n_actions(), kJumpAction); }

}  // namespace

std::string env_name(const EnvironmentSpec& env) {
  if (std::holds_alternative<RandomMdpEnv>(env)) return "random-mdp";
  return std::get<ChainEnv>(env).spec.cliff ? "cliff" : "chain";
}

ScheduleFn ScheduleSpec::build() const {
  return shape == Shape::Constant ? constant_schedule(value) : inverse_sqrt_schedule(value);
}

void ExperimentConfig::validate() const {
  if (rules.empty() || etas.empty()) throw ConfigError("rules and etas must be nonempty");
  for (const auto& r : rules) parse_rule(r, escort_p);
  for (double e : etas)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("learning rates must be positive and finite");
  if (total_steps <= 0) throw ConfigError("total_steps must be positive");
  if (checkpoint_interval <= 0) throw ConfigError("checkpoint_interval must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (n_seeds == 0) throw ConfigError("n_seeds must be positive");
  if (!(escort_p > 0.0)) throw ConfigError("escort_p must be positive");
  if (!(critic_lr > 0.0 && critic_lr <= 1.0)) throw ConfigError("critic_lr must lie in (0, 1]");
  if (const auto* s = std::get_if<ExplicitSchedules>(&exploration)) {
    for (const auto* spec : {&s->epsilon, &s->offpolicy})
      if (!(spec->value >= 0.0) || !std::isfinite(spec->value)) throw ConfigError("schedule values must be >= 0");
  }
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ChainEnv>) {
          if (e.spec.n_states < 3) throw ConfigError("chain needs at least 3 states");
          if (!(e.spec.beta > 0.0 && e.spec.beta < 1.0)) throw ConfigError("chain beta must lie in (0, 1)");
          if (e.spec.duplicate_optimal && e.spec.walk_copies < 1) throw ConfigError("walk_copies must be >= 1");
        } else {
          if (e.spec.n_states == 0 || e.spec.n_actions == 0) throw ConfigError("random MDP needs states and actions");
          if (e.spec.connectivity == 0 || e.spec.connectivity > e.spec.n_states)
            throw ConfigError("random MDP connectivity must lie in [1, n_states]");
        }
      },
      env);
  std::set<std::tuple<std::string, double>> seen;
  for (const auto& r : rules)
    for (double e : etas)
      if (!seen.emplace(r, e).second) throw ConfigError("duplicate (rule, eta) cell: " + r);
}

std::string ExperimentConfig::setting_name() const {
  if (const auto* tag = std::get_if<ExplorationSetting>(&exploration)) return to_string(*tag);
  return "custom";
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string where = "config";
  reject_unknown_keys(doc,
                      {"env", "setting", "schedules", "rules", "etas", "total_steps", "checkpoint_interval",
                       "threshold", "n_seeds", "base_seed", "escort_p", "critic_lr", "stop_at_threshold"},
                      where);
  ExperimentConfig config;
  if (doc.contains("env")) config.env = parse_env(doc.at("env"));
  config.threshold = std::holds_alternative<RandomMdpEnv>(config.env) ? 0.95 : 0.5;

  if (doc.contains("setting") && doc.contains("schedules"))
    throw ConfigError("config: give either 'setting' or 'schedules', not both");
  if (doc.contains("setting")) config.exploration = parse_setting(get_field<std::string>(doc, "setting", where));
  if (doc.contains("schedules")) {
    const auto& obj = doc.at("schedules");
    reject_unknown_keys(obj, {"epsilon", "offpolicy"}, "schedules");
    if (!obj.contains("epsilon") || !obj.contains("offpolicy"))
      throw ConfigError("schedules needs both 'epsilon' and 'offpolicy'");
    config.exploration = ExplicitSchedules{parse_schedule_spec(obj.at("epsilon"), "schedules.epsilon"),
                                           parse_schedule_spec(obj.at("offpolicy"), "schedules.offpolicy")};
  }
  read_optional(doc, "rules", where, config.rules);
  read_optional(doc, "etas", where, config.etas);
  read_optional(doc, "total_steps", where, config.total_steps);
  read_optional(doc, "checkpoint_interval", where, config.checkpoint_interval);
  read_optional(doc, "threshold", where, config.threshold);
  read_optional(doc, "n_seeds", where, config.n_seeds);
  read_optional(doc, "base_seed", where, config.base_seed);
  read_optional(doc, "escort_p", where, config.escort_p);
  read_optional(doc, "critic_lr", where, config.critic_lr);
  read_optional(doc, "stop_at_threshold", where, config.stop_at_threshold);
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json doc;
  if (const auto* r = std::get_if<RandomMdpEnv>(&config.env)) {
    doc["env"] = {{"type", "random-mdp"},
                  {"n_states", r->spec.n_states},
                  {"n_actions", r->spec.n_actions},
                  {"connectivity", r->spec.connectivity}};
    if (r->mdp_seed) doc["env"]["mdp_seed"] = *r->mdp_seed;
  } else {
    const auto& c = std::get<ChainEnv>(config.env).spec;
    doc["env"] = {{"type", c.cliff ? "cliff" : "chain"},
                  {"n_states", c.n_states},
                  {"beta", c.beta},
                  {"duplicate_optimal", c.duplicate_optimal},
                  {"walk_copies", c.walk_copies},
                  {"discount", c.discount}};
  }
  if (const auto* tag = std::get_if<ExplorationSetting>(&config.exploration)) {
    doc["setting"] = to_string(*tag);
  } else {
    const auto& s = std::get<ExplicitSchedules>(config.exploration);
    doc["schedules"] = {{"epsilon", schedule_to_json(s.epsilon)}, {"offpolicy", schedule_to_json(s.offpolicy)}};
  }
  doc["rules"] = config.rules;
  doc["etas"] = config.etas;
  doc["total_steps"] = config.total_steps;
  doc["checkpoint_interval"] = config.checkpoint_interval;
  doc["threshold"] = config.threshold;
  doc["n_seeds"] = config.n_seeds;
  doc["base_seed"] = config.base_seed;
  doc["escort_p"] = config.escort_p;
  doc["critic_lr"] = config.critic_lr;
  doc["stop_at_threshold"] = config.stop_at_threshold;
  return doc.dump(2);
}

PreparedEnvironment prepare_environment(const EnvironmentSpec& env, std::uint64_t run_seed) {
  if (const auto* r = std::get_if<RandomMdpEnv>(&env)) {
    RandomMdpSpec spec = r->spec;
    spec.seed = r->mdp_seed.value_or(run_seed);
    FiniteMdp mdp = make_random_mdp(spec);
    const double high = objective(mdp, optimal_values(mdp).greedy);
    const double low = objective(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()));
    return {std::move(mdp), PerformanceScale(low, high)};
  }
  FiniteMdp mdp = make_chain(std::get<ChainEnv>(env).spec);
  const double high = objective(mdp, optimal_values(mdp).greedy);
  const double low = objective(mdp, jump_policy(mdp));
  return {std::move(mdp), PerformanceScale(low, high)};
}

std::vector<SweepCell> sweep_cells(const ExperimentConfig& config) {
  std::vector<SweepCell> cells;
  cells.reserve(config.rules.size() * config.etas.size() * config.n_seeds);
  for (const auto& rule : config.rules)
    for (double eta : config.etas)
      for (std::size_t k = 0; k < config.n_seeds; ++k) cells.push_back({rule, eta, k});
  return cells;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& config, std::size_t threads, const ProgressFn& progress) {
  config.validate();
  const auto cells = sweep_cells(config);
  std::vector<RunRecord> records(cells.size());

  Schedules base;
  base.eta_critic = config.critic_lr;
  if (const auto* tag = std::get_if<ExplorationSetting>(&config.exploration)) {
    base = make_schedules(*tag, 1.0, config.critic_lr);
  } else {
    const auto& s = std::get<ExplicitSchedules>(config.exploration);
    base.epsilon = s.epsilon.build();
    base.offpolicy = s.offpolicy.build();
  }

  RunOptions options;
  options.total_steps = config.total_steps;
  options.checkpoint_interval = config.checkpoint_interval;
  options.threshold = config.threshold;
  options.stop_at_threshold = config.stop_at_threshold;

  // Shared environment when it does not depend on the run seed.
  std::optional<PreparedEnvironment> shared;
  const auto* random_env = std::get_if<RandomMdpEnv>(&config.env);
  if (!random_env || random_env->mdp_seed) shared = prepare_environment(config.env, 0);

  const std::string setting = config.setting_name();
  const std::string env = env_name(config.env);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::mutex progress_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const auto& cell = cells[i];
        const std::uint64_t seed = config.base_seed + cell.seed_index;
        std::optional<PreparedEnvironment> local;
        const PreparedEnvironment* prepared = shared ? &*shared : &local.emplace(prepare_environment(config.env, seed));
        const UpdateRule rule{parse_rule(cell.rule, config.escort_p), cell.eta};
        RunRecord record = run_agent(prepared->mdp, rule, base, prepared->scale, options, seed);
        record.setting = setting;
        record.env = env;
        records[i] = std::move(record);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, cells.size());
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(threads, cells.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> aggregate(std::span<const RunRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");
  using Key = std::tuple<std::string, std::string, std::string, double>;
  std::map<Key, std::size_t> index;
  std::vector<std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    const Key key{r.setting, r.env, r.rule, r.eta};
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& group : groups) {
    SummaryRow row;
    row.setting = group.front()->setting;
    row.env = group.front()->env;
    row.rule = group.front()->rule;
    row.eta = group.front()->eta;
    row.runs = group.size();
    std::vector<double> steps;
    std::size_t censored = 0;
    for (const auto* r : group) {
      steps.push_back(static_cast<double>(r->steps));
      censored += r->censored;
      row.max_steps = std::max(row.max_steps, r->steps);
    }
    row.median = quantile(steps, 0.5);
    row.q25 = quantile(steps, 0.25);
    row.q75 = quantile(steps, 0.75);
    row.censored_fraction = static_cast<double>(censored) / static_cast<double>(group.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "setting,env,rule,eta,runs,median,q25,q75,censored_fraction\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.env << ',' << r.rule << ',' << format_double(r.eta) << ',' << r.runs << ','
        << format_double(r.median) << ',' << format_double(r.q25) << ',' << format_double(r.q75) << ','
        << format_double(r.censored_fraction) << '\n';
  }
}

}  // namespace pulab
