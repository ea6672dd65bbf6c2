#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hybridopt/external_objective.hpp"
#include "hybridopt/objective.hpp"

namespace hybridopt {

enum class Method { hybrid, random_search, rounded_bo, discretized_bandit };

std::string to_string(Method method);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

/// A built-in benchmark by name, or an external command with its space.
struct FunctionSpec {
  std::string name;
  std::optional<MixedSpace> space;              // external only
  std::optional<ExternalObjectiveSpec> external;
};

FunctionSpec function_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FunctionSpec& spec);
std::unique_ptr<Objective> make_objective(const FunctionSpec& spec);

MixedSpace space_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MixedSpace& space);

struct ExperimentConfig {
  FunctionSpec function;
  std::vector<Method> methods{Method::hybrid};
  std::size_t n = 3;
  double alpha = 0.1;
  std::size_t bins = 11;
  std::size_t stop_m = 10;
  std::size_t stop_T = 50;
  bool stop_rule = false;
  double reward_tolerance = 0.0;
  std::size_t iters = 100;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  std::size_t rolling_window = 50;
  /// Baselines run iters * n evaluations so budgets match the hybrid's.
  bool match_evaluations = true;
  /// When false every wall_ms field is written as 0, making reruns
  /// byte-identical.
  bool record_wall_time = true;
  /// Run (method, seed) pairs concurrently; honoured only for objectives
  /// that declare themselves concurrency-safe.
  bool parallel = false;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json load_json_file(const std::filesystem::path& path);

/// One line of a trajectory file.
struct TrajectoryRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t t = 0;
  std::size_t eval_index = 0;
  std::vector<double> arm;
  Point x;
  double f_value = 0.0;
  double reward = 0.0;
  double best_so_far = 0.0;
  std::optional<double> gap;
  double wall_ms = 0.0;
};

nlohmann::json to_json(const TrajectoryRow& row);
TrajectoryRow row_from_json(const nlohmann::json& j);
std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& path);

struct RunSummary {
  std::string run_id;
  Method method = Method::hybrid;
  std::uint64_t seed = 0;
  std::filesystem::path file;  // relative to the output directory
  std::size_t rows = 0;
  std::size_t evaluations = 0;
  double best = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::filesystem::path output_dir;
  std::filesystem::path manifest;
  std::vector<RunSummary> runs;
};

std::string trajectory_file_name(Method method, std::uint64_t seed);

/// Runs one (method, seed) pair and streams its rows to `path`.
RunSummary run_single(const Objective& objective, const ExperimentConfig& config, Method method,
                      std::uint64_t seed, const std::filesystem::path& path);

/// Runs every (method, seed) pair, writing one JSONL file per pair and a
/// manifest.json. Config and function problems are reported before any
/// evaluation happens.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// A bench config may list several functions under "functions"; each one
/// runs into its own subdirectory of output_dir. Without "methods" every
/// method is run.
std::vector<ExperimentResult> run_benchmark(const nlohmann::json& config);

struct SummaryStats {
  std::string function;
  Method method = Method::hybrid;
  std::vector<double> bests;  // one per seed, in manifest order
  double mean_best = 0.0;
  double std_best = 0.0;
  std::optional<double> mean_final_gap;
  std::optional<double> min_final_gap;
  std::size_t total_evals = 0;
  double total_wall_ms = 0.0;
  bool single_seed = false;
};

/// Aggregates every manifest found under `dir` (recursively) into one row
/// per (function, method). Throws when two manifests describe the same
/// (function, method) with different settings.
std::vector<SummaryStats> summarize(const std::filesystem::path& dir);

inline constexpr std::string_view kSummaryHeader =
    "function,method,seeds,mean_best,std_best,mean_final_gap,min_final_gap,total_evals,single_seed";

std::string summary_csv(const std::vector<SummaryStats>& stats);

}  // namespace hybridopt
