#include "hybridopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hybridopt/bandit.hpp"
#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

// Tracks best-so-far and forwards finished steps.
class StepSink {
 public:
  explicit StepSink(const BaselineObserver& on_step) : on_step_(on_step) {}

  void emit(BaselineStep step) {
    if (!best_ || step.value > best_->value) best_ = step;
    step.best_so_far = best_->value;
    step.best_arm = best_->arm;
    step.best_x = best_->x;
    if (on_step_) on_step_(step);
    steps_.push_back(std::move(step));
  }

  std::vector<BaselineStep> take() { return std::move(steps_); }

 private:
  const BaselineObserver& on_step_;
  std::optional<BaselineStep> best_;
  std::vector<BaselineStep> steps_;
};

double evaluate_checked(const Objective& objective, const Arm& arm, const Point& x, std::size_t t) {
  try {
    const double y = objective.evaluate(arm, x);
    if (!std::isfinite(y)) throw EvaluationError("objective returned a non-finite value");
    return y;
  } catch (const std::exception& e) {
    throw EvaluationError("iteration " + std::to_string(t) + ": " + e.what());
  }
}

}  // namespace

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::random_search:
      return "random_search";
    case BaselineMethod::rounded_bo:
      return "rounded_bo";
    case BaselineMethod::discretized_bandit:
      return "discretized_bandit";
  }
  return "unknown";
}

void BaselineConfig::validate(const MixedSpace& space) const {
  if (iters < 1) throw InvalidArgument("baseline: iters must be at least 1");
  if (method == BaselineMethod::discretized_bandit) {
    if (bins < 1 || (space.continuous_dim() > 0 && bins < 2))
      throw InvalidArgument("discretized_bandit: bins must be at least 2 when continuous variables exist");
    if (!(alpha > 0.0)) throw InvalidArgument("discretized_bandit: alpha must be positive");
  }
}

Box relaxed_box(const MixedSpace& space) {
  Box box;
  for (const auto& v : space.discrete()) {
    double lo = v.domain.front(), hi = v.domain.back();
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    box.lower.push_back(lo);
    box.upper.push_back(hi);
  }
  const Box cont = space.continuous_box();
  box.lower.insert(box.lower.end(), cont.lower.begin(), cont.lower.end());
  box.upper.insert(box.upper.end(), cont.upper.begin(), cont.upper.end());
  return box;
}

MixedSpace discretized_space(const MixedSpace& space, std::size_t bins) {
  std::vector<DiscreteVar> vars = space.discrete();
  for (const auto& c : space.continuous()) vars.push_back(discretize_continuous(c, bins));
  return MixedSpace(std::move(vars), {});
}

std::vector<BaselineStep> random_search(const Objective& objective, const BaselineConfig& config,
                                        const BaselineObserver& on_step) {
  const MixedSpace& space = objective.space();
  config.validate(space);
  Rng rng(derive_seed(config.seed, "random_search"));
  StepSink sink(on_step);
  std::vector<double> values(space.discrete_dim());
  for (std::size_t t = 0; t < config.iters; ++t) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& domain = space.discrete()[i].domain;
      values[i] = domain[rng.index(domain.size())];
    }
    BaselineStep step;
    step.t = t;
    step.arm = make_arm(space, values);
    for (const auto& c : space.continuous()) step.x.push_back(rng.uniform(c.lower, c.upper));
    step.value = evaluate_checked(objective, step.arm, step.x, t);
    step.reward = step.value;
    sink.emit(std::move(step));
  }
  return sink.take();
}

std::vector<BaselineStep> rounded_bo(const Objective& objective, const BaselineConfig& config,
                                     const BaselineObserver& on_step) {
  const MixedSpace& space = objective.space();
  config.validate(space);
  BoState state = make_bo_state(relaxed_box(space), derive_seed(config.seed, "rounded_bo"), config.bo);
  const std::size_t k = space.discrete_dim();
  StepSink sink(on_step);
  std::vector<double> values(k);
  for (std::size_t t = 0; t < config.iters; ++t) {
    BaselineStep step;
    step.t = t;
    step.relaxed = suggest(state);
    for (std::size_t i = 0; i < k; ++i) values[i] = round_to_domain(step.relaxed[i], space.discrete()[i]);
    step.arm = make_arm(space, values);
    for (std::size_t i = 0; i < space.continuous_dim(); ++i) {
      const auto& c = space.continuous()[i];
      step.x.push_back(std::clamp(step.relaxed[k + i], c.lower, c.upper));
    }
    step.value = evaluate_checked(objective, step.arm, step.x, t);
    step.reward = step.value;
    observe(state, step.relaxed, step.value);
    sink.emit(std::move(step));
  }
  return sink.take();
}

std::vector<BaselineStep> discretized_bandit(const Objective& objective, const BaselineConfig& config,
                                             const BaselineObserver& on_step) {
  const MixedSpace& space = objective.space();
  config.validate(space);
  const MixedSpace grid = discretized_space(space, config.bins);
  const std::vector<Arm> arms = enumerate_arms(grid, config.arm_cap);
  BanditState bandit = BanditState::uniform(arms.size(), config.alpha);
  Rng rng(derive_seed(config.seed, "discretized_bandit"));
  const std::size_t k = space.discrete_dim();
  StepSink sink(on_step);
  for (std::size_t t = 0; t < config.iters; ++t) {
    const std::size_t action = sample_index(action_probabilities(bandit), rng.uniform());
    const auto& full = arms[action].values;
    BaselineStep step;
    step.t = t;
    step.arm = make_arm(space, std::span<const double>(full.data(), k));
    step.x.assign(full.begin() + static_cast<std::ptrdiff_t>(k), full.end());
    step.value = evaluate_checked(objective, step.arm, step.x, t);
    step.reward = step.value;
    update(bandit, action, step.reward);
    sink.emit(std::move(step));
  }
  return sink.take();
}

std::vector<BaselineStep> run_baseline(const Objective& objective, const BaselineConfig& config,
                                       const BaselineObserver& on_step) {
  switch (config.method) {
    case BaselineMethod::random_search:
      return random_search(objective, config, on_step);
    case BaselineMethod::rounded_bo:
      return rounded_bo(objective, config, on_step);
    case BaselineMethod::discretized_bandit:
      return discretized_bandit(objective, config, on_step);
  }
  throw InvalidArgument("unknown baseline method");
}

}  // namespace hybridopt
