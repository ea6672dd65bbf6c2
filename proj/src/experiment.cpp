#include "hybridopt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "hybridopt/baselines.hpp"
#include "hybridopt/error.hpp"
#include "hybridopt/hybrid.hpp"
#include "hybridopt/stats.hpp"

namespace hybridopt {
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFormat = "hybridopt.manifest";
constexpr int kManifestVersion = 1;
constexpr const char* kToolVersion = "hybridopt 0.1.0";

const std::set<std::string> kConfigKeys{
    "function", "method", "methods", "n", "alpha", "bins", "stop_m", "stop_T", "stop_rule", "reward_tolerance",
    "iters", "seeds", "output_dir", "rolling_window", "match_evaluations", "record_wall_time", "parallel"};

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config field '") + key + "' has the wrong type");
  }
}

nlohmann::json optimum_to_json(const std::optional<KnownOptimum>& opt) {
  if (!opt) return nullptr;
  return {{"value", opt->value}, {"arm", opt->arm_values}, {"x", opt->x}};
}

std::optional<KnownOptimum> optimum_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  KnownOptimum opt;
  opt.value = j.at("value").get<double>();
  opt.arm_values = j.value("arm", std::vector<double>{});
  opt.x = j.value("x", Point{});
  return opt;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return std::round(ms * 1000.0) / 1000.0;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

// Settings that must agree for two manifests to be summarized together.
nlohmann::json comparable_settings(const nlohmann::json& manifest) {
  nlohmann::json cfg = manifest.at("config");
  for (const char* key : {"seeds", "output_dir", "methods", "parallel", "record_wall_time", "rolling_window"})
    cfg.erase(key);
  return {{"function", manifest.at("function")}, {"config", cfg}};
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::hybrid:
      return "hybrid";
    case Method::random_search:
      return "random_search";
    case Method::rounded_bo:
      return "rounded_bo";
    case Method::discretized_bandit:
      return "discretized_bandit";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (available: hybrid, random_search, rounded_bo, discretized_bandit)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::hybrid, Method::random_search, Method::rounded_bo,
                                           Method::discretized_bandit};
  return methods;
}

MixedSpace space_from_json(const nlohmann::json& j) {
  try {
    std::vector<DiscreteVar> discrete;
    for (const auto& v : j.value("discrete", nlohmann::json::array()))
      discrete.push_back({v.at("name").get<std::string>(), v.at("values").get<std::vector<double>>()});
    std::vector<ContinuousVar> continuous;
    for (const auto& v : j.value("continuous", nlohmann::json::array()))
      continuous.push_back({v.at("name").get<std::string>(), v.at("lower").get<double>(), v.at("upper").get<double>()});
    return MixedSpace(std::move(discrete), std::move(continuous));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed space definition: ") + e.what());
  }
}

nlohmann::json to_json(const MixedSpace& space) {
  nlohmann::json discrete = nlohmann::json::array();
  for (const auto& v : space.discrete()) discrete.push_back({{"name", v.name}, {"values", v.domain}});
  nlohmann::json continuous = nlohmann::json::array();
  for (const auto& v : space.continuous())
    continuous.push_back({{"name", v.name}, {"lower", v.lower}, {"upper", v.upper}});
  return {{"discrete", discrete}, {"continuous", continuous}};
}

FunctionSpec function_spec_from_json(const nlohmann::json& j) {
  FunctionSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return spec;
  }
  if (!j.is_object()) throw InvalidArgument("'function' must be a name or an external-command object");
  try {
    if (!j.contains("command")) {
      spec.name = j.at("name").get<std::string>();
      return spec;
    }
    ExternalObjectiveSpec ext;
    ext.name = j.value("name", std::string("external"));
    ext.command = j.at("command").get<std::string>();
    ext.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60'000LL));
    ext.known_optimum = optimum_from_json(j.value("known_optimum", nlohmann::json()));
    ext.concurrent_safe = j.value("concurrent_safe", false);
    spec.name = ext.name;
    spec.space = space_from_json(j.at("space"));
    spec.external = std::move(ext);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed function definition: ") + e.what());
  }
  return spec;
}

nlohmann::json to_json(const FunctionSpec& spec) {
  if (!spec.external) return spec.name;
  return {{"name", spec.external->name},
          {"command", spec.external->command},
          {"timeout_ms", spec.external->timeout.count()},
          {"space", to_json(*spec.space)},
          {"known_optimum", optimum_to_json(spec.external->known_optimum)},
          {"concurrent_safe", spec.external->concurrent_safe}};
}

std::unique_ptr<Objective> make_objective(const FunctionSpec& spec) {
  if (spec.external) return std::make_unique<ExternalObjective>(*spec.space, *spec.external);
  return make_synthetic_objective(spec.name);
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw InvalidArgument("config: seeds must not be empty");
  if (iters < 1) throw InvalidArgument("config: iters must be at least 1");
  if (methods.empty()) throw InvalidArgument("config: no method selected");
  if (n < 1) throw InvalidArgument("config: n must be at least 1");
  if (!(alpha > 0.0)) throw InvalidArgument("config: alpha must be positive");
  if (rolling_window < 1) throw InvalidArgument("config: rolling_window must be at least 1");
  if (stop_m < 1 || stop_m > stop_T) throw InvalidArgument("config: need 1 <= stop_m <= stop_T");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw InvalidArgument("config: duplicate seeds");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key) && key != "functions") throw InvalidArgument("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (!j.contains("function")) throw InvalidArgument("config: 'function' is required");
  c.function = function_spec_from_json(j.at("function"));
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  } else if (j.contains("method")) {
    c.methods = {parse_method(j.at("method").get<std::string>())};
  }
  read_field(j, "n", c.n);
  read_field(j, "alpha", c.alpha);
  read_field(j, "bins", c.bins);
  read_field(j, "stop_m", c.stop_m);
  read_field(j, "stop_T", c.stop_T);
  read_field(j, "stop_rule", c.stop_rule);
  read_field(j, "reward_tolerance", c.reward_tolerance);
  read_field(j, "iters", c.iters);
  read_field(j, "seeds", c.seeds);
  std::string out = c.output_dir.string();
  read_field(j, "output_dir", out);
  c.output_dir = out;
  read_field(j, "rolling_window", c.rolling_window);
  read_field(j, "match_evaluations", c.match_evaluations);
  read_field(j, "record_wall_time", c.record_wall_time);
  read_field(j, "parallel", c.parallel);
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(to_string(m));
  return {{"function", to_json(c.function)},
          {"methods", methods},
          {"n", c.n},
          {"alpha", c.alpha},
          {"bins", c.bins},
          {"stop_m", c.stop_m},
          {"stop_T", c.stop_T},
          {"stop_rule", c.stop_rule},
          {"reward_tolerance", c.reward_tolerance},
          {"iters", c.iters},
          {"seeds", c.seeds},
          {"output_dir", c.output_dir.string()},
          {"rolling_window", c.rolling_window},
          {"match_evaluations", c.match_evaluations},
          {"record_wall_time", c.record_wall_time},
          {"parallel", c.parallel}};
}

nlohmann::json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const TrajectoryRow& row) {
  nlohmann::json gap = nullptr;
  if (row.gap) gap = *row.gap;
  return {{"run_id", row.run_id}, {"seed", row.seed}, {"t", row.t},
          {"eval_index", row.eval_index}, {"arm", row.arm}, {"x", row.x},
          {"f_value", row.f_value}, {"reward", row.reward}, {"best_so_far", row.best_so_far},
          {"gap", gap}, {"wall_ms", row.wall_ms}};
}

TrajectoryRow row_from_json(const nlohmann::json& j) {
  try {
    TrajectoryRow row;
    row.run_id = j.at("run_id").get<std::string>();
    row.seed = j.at("seed").get<std::uint64_t>();
    row.t = j.at("t").get<std::size_t>();
    row.eval_index = j.at("eval_index").get<std::size_t>();
    row.arm = j.at("arm").get<std::vector<double>>();
    row.x = j.at("x").get<Point>();
    row.f_value = j.at("f_value").get<double>();
    row.reward = j.at("reward").get<double>();
    row.best_so_far = j.at("best_so_far").get<double>();
    if (!j.at("gap").is_null()) row.gap = j["gap"].get<double>();
    row.wall_ms = j.at("wall_ms").get<double>();
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("malformed trajectory row: ") + e.what());
  }
}

std::vector<TrajectoryRow> read_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory " + path.string());
  std::vector<TrajectoryRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      rows.push_back(row_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw SerializationError("malformed line in " + path.string() + ": " + e.what());
    }
  }
  return rows;
}

std::string trajectory_file_name(Method method, std::uint64_t seed) {
  return to_string(method) + "_seed" + std::to_string(seed) + ".jsonl";
}

RunSummary run_single(const Objective& objective, const ExperimentConfig& config, Method method, std::uint64_t seed,
                      const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const auto known = objective.known_optimum();
  const auto start = std::chrono::steady_clock::now();

  RunSummary summary;
  summary.run_id = objective.name() + "/" + to_string(method) + "/seed" + std::to_string(seed);
  summary.method = method;
  summary.seed = seed;
  summary.file = path.filename();

  auto emit = [&](TrajectoryRow row) {
    row.run_id = summary.run_id;
    row.seed = seed;
    if (known) row.gap = std::fabs(known->value - row.best_so_far);
    row.wall_ms = config.record_wall_time ? elapsed_ms(start) : 0.0;
    out << to_json(row).dump() << '\n';
    ++summary.rows;
    summary.evaluations = row.eval_index;
    summary.best = row.best_so_far;
  };

  if (method == Method::hybrid) {
    HybridConfig hc;
    hc.n = config.n;
    hc.alpha = config.alpha;
    hc.stop_m = config.stop_m;
    hc.stop_T = config.stop_T;
    hc.stop_rule = config.stop_rule;
    hc.reward_tolerance = config.reward_tolerance;
    hc.max_iters = config.iters;
    hc.seed = seed;
    HybridOptimizer opt(objective, hc);
    opt.run([&](const IterationRecord& r) {
      // The row's point is the iteration's best evaluation (first on ties).
      const EvaluationRecord* top = &r.evals.front();
      for (const auto& e : r.evals) {
        if (e.value > top->value) top = &e;
      }
      TrajectoryRow row;
      row.t = r.t;
      row.eval_index = r.evals.back().eval_index;
      row.arm = r.arm.values;
      row.x = top->x;
      row.f_value = top->value;
      row.reward = r.reward;
      row.best_so_far = r.best_so_far;
      emit(std::move(row));
    });
  } else {
    BaselineConfig bc;
    bc.method = method == Method::random_search ? BaselineMethod::random_search
                : method == Method::rounded_bo  ? BaselineMethod::rounded_bo
                                                : BaselineMethod::discretized_bandit;
    bc.iters = config.match_evaluations ? config.iters * config.n : config.iters;
    bc.seed = seed;
    bc.bins = config.bins;
    bc.alpha = config.alpha;
    run_baseline(objective, bc, [&](const BaselineStep& s) {
      TrajectoryRow row;
      row.t = s.t;
      row.eval_index = s.t + 1;
      row.arm = s.arm.values;
      row.x = s.x;
      row.f_value = s.value;
      row.reward = s.reward;
      row.best_so_far = s.best_so_far;
      emit(std::move(row));
    });
  }
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
  summary.wall_ms = config.record_wall_time ? elapsed_ms(start) : 0.0;
  return summary;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto objective = make_objective(config.function);
  if (std::find(config.methods.begin(), config.methods.end(), Method::discretized_bandit) != config.methods.end()) {
    arm_count(discretized_space(objective->space(), config.bins));
  }
  ensure_writable(config.output_dir);

  ExperimentResult result;
  result.output_dir = config.output_dir;
  std::vector<std::pair<Method, std::uint64_t>> jobs;
  for (Method m : config.methods) {
    for (std::uint64_t s : config.seeds) jobs.emplace_back(m, s);
  }
  auto path_of = [&](Method m, std::uint64_t s) { return config.output_dir / trajectory_file_name(m, s); };

  if (config.parallel && objective->concurrent_safe() && jobs.size() > 1) {
    std::vector<std::future<RunSummary>> futures;
    for (const auto& [m, s] : jobs) {
      futures.push_back(std::async(std::launch::async, [&, m = m, s = s] {
        return run_single(*objective, config, m, s, path_of(m, s));
      }));
    }
    for (auto& f : futures) result.runs.push_back(f.get());
  } else {
    for (const auto& [m, s] : jobs) result.runs.push_back(run_single(*objective, config, m, s, path_of(m, s)));
  }

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    runs.push_back({{"run_id", r.run_id},
                    {"method", to_string(r.method)},
                    {"seed", r.seed},
                    {"file", r.file.string()},
                    {"rows", r.rows},
                    {"evaluations", r.evaluations},
                    {"best", r.best},
                    {"wall_ms", r.wall_ms}});
  }
  nlohmann::json manifest = {{"format", kManifestFormat},
                             {"version", kManifestVersion},
                             {"tool", kToolVersion},
                             {"function",
                              {{"name", objective->name()},
                               {"space", to_json(objective->space())},
                               {"known_optimum", optimum_to_json(objective->known_optimum())}}},
                             {"config", to_json(config)},
                             {"runs", runs}};
  result.manifest = config.output_dir / "manifest.json";
  std::ofstream out(result.manifest, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed writing " + result.manifest.string());
  return result;
}

std::vector<ExperimentResult> run_benchmark(const nlohmann::json& config) {
  if (!config.is_object()) throw InvalidArgument("config must be a JSON object");
  nlohmann::json base = config;
  if (!base.contains("methods") && !base.contains("method")) {
    std::vector<std::string> names;
    for (Method m : all_methods()) names.push_back(to_string(m));
    base["methods"] = names;
  }
  if (!base.contains("functions")) return {run_experiment(config_from_json(base))};

  const nlohmann::json functions = base.at("functions");
  base.erase("functions");
  const fs::path root = base.value("output_dir", std::string("out"));
  // Validate everything up front so a bad entry fails before any evaluation.
  std::vector<ExperimentConfig> configs;
  for (const auto& f : functions) {
    nlohmann::json one = base;
    one["function"] = f;
    ExperimentConfig c = config_from_json(one);
    make_objective(c.function);
    c.output_dir = root / c.function.name;
    configs.push_back(std::move(c));
  }
  std::vector<ExperimentResult> results;
  for (const auto& c : configs) results.push_back(run_experiment(c));
  return results;
}

std::vector<SummaryStats> summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "manifest.json") manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty()) throw Error("no manifest.json found under " + dir.string());

  struct Group {
    nlohmann::json settings;
    SummaryStats stats;
    std::vector<double> gaps;
    std::set<std::uint64_t> seeds;
  };
  std::vector<Group> groups;
  std::map<std::pair<std::string, int>, std::size_t> index;

  for (const auto& path : manifests) {
    const nlohmann::json manifest = load_json_file(path);
    if (manifest.value("format", std::string{}) != kManifestFormat || manifest.value("version", -1) != kManifestVersion)
      throw Error("unsupported manifest " + path.string());
    const nlohmann::json settings = comparable_settings(manifest);
    const std::string function = manifest.at("function").at("name").get<std::string>();
    for (const auto& run : manifest.at("runs")) {
      const Method method = parse_method(run.at("method").get<std::string>());
      const auto key = std::make_pair(function, static_cast<int>(method));
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, groups.size()).first;
        Group g;
        g.settings = settings;
        g.stats.function = function;
        g.stats.method = method;
        groups.push_back(std::move(g));
      }
      Group& g = groups[it->second];
      if (g.settings != settings)
        throw Error("incompatible manifests for " + function + "/" + to_string(method) + " (" + path.string() + ")");
      const auto seed = run.at("seed").get<std::uint64_t>();
      if (!g.seeds.insert(seed).second)
        throw Error("seed " + std::to_string(seed) + " of " + function + "/" + to_string(method) + " appears twice");
      const auto rows = read_trajectory(path.parent_path() / run.at("file").get<std::string>());
      if (rows.empty()) throw Error("empty trajectory for " + run.at("run_id").get<std::string>());
      const auto& last = rows.back();
      g.stats.bests.push_back(last.best_so_far);
      if (last.gap) g.gaps.push_back(*last.gap);
      g.stats.total_evals += last.eval_index;
      g.stats.total_wall_ms += last.wall_ms;
    }
  }

  std::vector<SummaryStats> out;
  for (auto& g : groups) {
    auto& s = g.stats;
    s.mean_best = mean(s.bests);
    s.std_best = sample_std(s.bests);
    s.single_seed = s.bests.size() == 1;
    if (!g.gaps.empty() && g.gaps.size() == s.bests.size()) {
      s.mean_final_gap = mean(g.gaps);
      s.min_final_gap = *std::min_element(g.gaps.begin(), g.gaps.end());
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const SummaryStats& a, const SummaryStats& b) {
    return std::tie(a.function, a.method) < std::tie(b.function, b.method);
  });
  return out;
}

std::string summary_csv(const std::vector<SummaryStats>& stats) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const auto& s : stats) {
    out << s.function << ',' << to_string(s.method) << ',' << s.bests.size() << ',' << csv_number(s.mean_best) << ','
        << csv_number(s.std_best) << ',' << (s.mean_final_gap ? csv_number(*s.mean_final_gap) : "") << ','
        << (s.min_final_gap ? csv_number(*s.min_final_gap) : "") << ',' << s.total_evals << ','
        << (s.single_seed ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace hybridopt
