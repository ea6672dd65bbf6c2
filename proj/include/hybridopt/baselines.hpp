#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hybridopt/bo.hpp"
#include "hybridopt/objective.hpp"

namespace hybridopt {

enum class BaselineMethod { random_search, rounded_bo, discretized_bandit };

std::string to_string(BaselineMethod method);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::random_search;
  std::size_t iters = 100;  // one objective evaluation per iteration
  std::uint64_t seed = 0;
  std::size_t bins = 11;    // discretized_bandit: values per continuous variable
  double alpha = 0.1;       // discretized_bandit: bandit step size
  BoConfig bo;              // rounded_bo
  std::size_t arm_cap = kDefaultArmCap;

  void validate(const MixedSpace& space) const;
};

/// One baseline iteration, already mapped back into the original space.
struct BaselineStep {
  std::size_t t = 0;
  Arm arm;
  Point x;
  double value = 0.0;
  double reward = 0.0;  // the raw objective value for every baseline
  double best_so_far = 0.0;
  Arm best_arm;
  Point best_x;
  /// rounded_bo only: the unrounded point in the relaxed box.
  Point relaxed;
};

using BaselineObserver = std::function<void(const BaselineStep&)>;

/// Uniform arm (each discrete variable uniform over its domain) and uniform
/// continuous coordinates, one evaluation per iteration.
std::vector<BaselineStep> random_search(const Objective& objective, const BaselineConfig& config,
                                        const BaselineObserver& on_step = {});

/// Bayesian optimization over the relaxed box; discrete coordinates are
/// rounded to their domains before evaluation while the GP keeps the
/// unrounded suggestion.
std::vector<BaselineStep> rounded_bo(const Objective& objective, const BaselineConfig& config,
                                     const BaselineObserver& on_step = {});

/// Gradient bandit over the fully discretized space, rewarded with the
/// objective value of the pulled point.
std::vector<BaselineStep> discretized_bandit(const Objective& objective, const BaselineConfig& config,
                                             const BaselineObserver& on_step = {});

std::vector<BaselineStep> run_baseline(const Objective& objective, const BaselineConfig& config,
                                       const BaselineObserver& on_step = {});

/// Discrete variables relaxed to [min(domain), max(domain)] (a single-value
/// domain v becomes [v - 0.5, v + 0.5]) followed by the continuous box.
Box relaxed_box(const MixedSpace& space);

/// Discrete variables unchanged, each continuous variable replaced by
/// discretize_continuous(var, bins).
MixedSpace discretized_space(const MixedSpace& space, std::size_t bins);

}  // namespace hybridopt
