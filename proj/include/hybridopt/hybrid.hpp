#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hybridopt/bandit.hpp"
#include "hybridopt/bo.hpp"
#include "hybridopt/objective.hpp"

namespace hybridopt {

struct HybridConfig {
  std::size_t n = 3;  // continuous-solver steps (objective evaluations) per iteration
  double alpha = 0.1;
  std::size_t stop_m = 10;
  std::size_t stop_T = 50;
  bool stop_rule = true;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
  /// Rewards closer than this count as the same reward in the stop rule.
  double reward_tolerance = 0.0;
  ContinuousSolverKind solver = ContinuousSolverKind::bayesian;
  BoConfig bo;
  std::size_t arm_cap = kDefaultArmCap;

  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;
  Arm arm;
  std::vector<EvaluationRecord> evals;  // this iteration's n evaluations
  double reward = 0.0;                  // best value ever observed on `arm`
  double pi_selected = 0.0;             // probability of `arm` before the update
  double best_so_far = 0.0;
  Arm best_arm;
  Point best_x;
};

/// (arm, reward) pair the stop rule counts.
struct StopEntry {
  std::size_t arm = 0;
  double reward = 0.0;
};

/// True when one (arm, reward) pair occurs at least stop_m times among the
/// last min(size, stop_T) entries. Entries must be in iteration order.
bool should_stop(std::span<const StopEntry> history, const HybridConfig& config);
bool should_stop(std::span<const IterationRecord> history, const HybridConfig& config);

/// Softmax gradient bandit over the discrete assignments, with one cached
/// continuous solver per arm that resumes every time the arm is picked.
class HybridOptimizer {
 public:
  HybridOptimizer(const Objective& objective, HybridConfig config);

  /// One iteration: sample an arm, run n solver steps on it, reward the arm
  /// with its best value so far and update the bandit.
  IterationRecord step();

  /// Steps until the stop rule fires or max_iters iterations have run.
  std::vector<IterationRecord> run(const std::function<void(const IterationRecord&)>& on_record = {});

  bool finished() const { return stopped_ || t_ >= config_.max_iters; }
  bool stopped_by_rule() const { return stopped_; }
  std::size_t iteration() const { return t_; }
  std::size_t evaluations() const { return evals_; }
  const HybridConfig& config() const { return config_; }
  const std::vector<Arm>& arms() const { return arms_; }
  const BanditState& bandit() const { return bandit_; }
  /// Cached solver of an arm, or nullptr if the arm was never picked.
  const ContinuousOptimizer* cache_entry(std::size_t arm) const;

  /// Writes hybrid.json plus cache/arm_<index>.json for every visited arm.
  void save_checkpoint(const std::filesystem::path& dir) const;
  /// Rebuilds an optimizer from save_checkpoint output. The config must use
  /// the same seed, n and space as the checkpointed run.
  static HybridOptimizer resume(const Objective& objective, HybridConfig config, const std::filesystem::path& dir);

 private:
  const Objective* objective_;
  HybridConfig config_;
  std::vector<Arm> arms_;
  BanditState bandit_;
  Rng rng_;
  std::map<std::size_t, std::unique_ptr<ContinuousOptimizer>> cache_;
  std::deque<StopEntry> recent_;
  std::size_t t_ = 0;
  std::size_t evals_ = 0;
  bool stopped_ = false;
  std::optional<EvaluationRecord> best_;
};

std::vector<IterationRecord> run_hybrid(const Objective& objective, const HybridConfig& config);

}  // namespace hybridopt
