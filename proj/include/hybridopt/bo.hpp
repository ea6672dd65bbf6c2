#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridopt/gp.hpp"
#include "hybridopt/random.hpp"
#include "hybridopt/space.hpp"

namespace hybridopt {

struct BoConfig {
  GpHyperConfig gp;
  std::size_t candidates = 1024;      // uniform EI candidates per suggestion
  std::size_t neighborhood = 64;      // Gaussian perturbations of the incumbent
  double neighborhood_scale = 0.05;   // per unit-cube axis
  /// Largest training set handed to the GP. Beyond it the model keeps the
  /// best half of the observations and fills up with the most recent ones.
  std::size_t max_model_points = 64;
};

struct Incumbent {
  Point x;
  double y = 0.0;
};

/// Complete, serializable state of one ask/tell Bayesian optimizer.
struct BoState {
  Box bounds;
  BoConfig config;
  std::vector<Point> xs;  // raw coordinates, all inside bounds
  std::vector<double> ys;
  std::optional<Incumbent> incumbent;
  std::deque<Point> init_design;  // remaining space-filling points (raw)
  Rng rng;
  std::size_t eval_count = 0;
};

/// Fresh state with a seeded Latin-hypercube initial design of d + 1 points.
BoState make_bo_state(Box bounds, std::uint64_t seed, BoConfig config = {});

/// Seeded Latin-hypercube sample of `count` points in [0, 1]^dim.
std::vector<Point> latin_hypercube(std::size_t count, std::size_t dim, Rng& rng);

/// GP fitted on the state's observations (or the model subset, when capped).
GpModel fit_model(const BoState& state);

/// Indices of the observations used for the surrogate, ascending.
std::vector<std::size_t> model_subset(const std::vector<double>& ys, std::size_t cap);

/// Next point to evaluate. Pops the initial design first, then maximizes EI
/// over seeded candidates plus the incumbent's neighbourhood.
Point suggest(BoState& state);

/// Index of the candidate (rows of a unit-cube matrix) with the highest EI;
/// the first one wins ties.
std::size_t argmax_expected_improvement(const GpModel& model, const Eigen::MatrixXd& candidates, double best);

void observe(BoState& state, const Point& x, double y);

/// Highest observed value; throws when the state has no observations.
double reward_of(const BoState& state);

inline constexpr int kBoStateVersion = 1;

nlohmann::json to_json(const BoState& state);
BoState bo_state_from_json(const nlohmann::json& j);
std::string serialize(const BoState& state);
BoState deserialize(const std::string& payload);

/// Pluggable continuous solver used per arm by the hybrid optimizer.
class ContinuousOptimizer {
 public:
  virtual ~ContinuousOptimizer() = default;

  virtual Point suggest() = 0;
  virtual void observe(const Point& x, double y) = 0;
  virtual std::optional<double> best_value() const = 0;
  virtual std::size_t observation_count() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

enum class ContinuousSolverKind { bayesian, random };

class BayesianOptimizer final : public ContinuousOptimizer {
 public:
  explicit BayesianOptimizer(BoState state) : state_(std::move(state)) {}

  Point suggest() override { return hybridopt::suggest(state_); }
  void observe(const Point& x, double y) override { hybridopt::observe(state_, x, y); }
  std::optional<double> best_value() const override;
  std::size_t observation_count() const override { return state_.eval_count; }
  nlohmann::json to_json() const override;

  const BoState& state() const { return state_; }

 private:
  BoState state_;
};

/// Uniform sampling over the box; mainly a reference solver for tests.
class RandomContinuousOptimizer final : public ContinuousOptimizer {
 public:
  RandomContinuousOptimizer(Box bounds, std::uint64_t seed) : bounds_(std::move(bounds)), rng_(seed) {}

  Point suggest() override;
  void observe(const Point& x, double y) override;
  std::optional<double> best_value() const override { return best_; }
  std::size_t observation_count() const override { return count_; }
  nlohmann::json to_json() const override;

  static RandomContinuousOptimizer from_json(const nlohmann::json& j);

 private:
  Box bounds_;
  Rng rng_;
  std::optional<double> best_;
  std::size_t count_ = 0;
};

std::unique_ptr<ContinuousOptimizer> make_continuous_optimizer(ContinuousSolverKind kind, const Box& bounds,
                                                               std::uint64_t seed, const BoConfig& config);
std::unique_ptr<ContinuousOptimizer> load_continuous_optimizer(const nlohmann::json& j);

}  // namespace hybridopt
