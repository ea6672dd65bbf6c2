#include "hybridopt/bo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

constexpr const char* kBoFormat = "hybridopt.bo_state";
constexpr const char* kRandomFormat = "hybridopt.random_solver";

nlohmann::json config_to_json(const BoConfig& c) {
  return {{"length_scale_grid", c.gp.length_scale_grid},
          {"noise_variance", c.gp.noise_variance},
          {"max_jitter", c.gp.max_jitter},
          {"candidates", c.candidates},
          {"neighborhood", c.neighborhood},
          {"neighborhood_scale", c.neighborhood_scale},
          {"max_model_points", c.max_model_points}};
}

BoConfig config_from_json(const nlohmann::json& j) {
  BoConfig c;
  c.gp.length_scale_grid = j.at("length_scale_grid").get<std::vector<double>>();
  c.gp.noise_variance = j.at("noise_variance").get<double>();
  c.gp.max_jitter = j.at("max_jitter").get<double>();
  c.candidates = j.at("candidates").get<std::size_t>();
  c.neighborhood = j.at("neighborhood").get<std::size_t>();
  c.neighborhood_scale = j.at("neighborhood_scale").get<double>();
  c.max_model_points = j.at("max_model_points").get<std::size_t>();
  return c;
}

void check_format(const nlohmann::json& j, const char* format) {
  if (!j.is_object() || j.value("format", std::string{}) != format)
    throw SerializationError(std::string("payload is not a ") + format);
  const int version = j.value("version", -1);
  if (version != kBoStateVersion)
    throw SerializationError("unsupported " + std::string(format) + " version " + std::to_string(version));
}

}  // namespace

BoState make_bo_state(Box bounds, std::uint64_t seed, BoConfig config) {
  if (bounds.lower.size() != bounds.upper.size()) throw InvalidArgument("bounds dimension mismatch");
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    if (!(bounds.lower[i] < bounds.upper[i])) throw InvalidArgument("bounds need lower < upper");
  }
  BoState state;
  state.bounds = std::move(bounds);
  state.config = std::move(config);
  state.rng = Rng(seed);
  const std::size_t d = state.bounds.dim();
  for (auto& u : latin_hypercube(d + 1, d, state.rng)) state.init_design.push_back(from_unit_cube(u, state.bounds));
  return state;
}

std::vector<Point> latin_hypercube(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<Point> points(count, Point(dim));
  std::vector<std::size_t> strata(count);
  for (std::size_t j = 0; j < dim; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with the stream's own index draws.
    for (std::size_t i = count; i > 1; --i) std::swap(strata[i - 1], strata[rng.index(i)]);
    for (std::size_t i = 0; i < count; ++i) {
      points[i][j] = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(count);
    }
  }
  return points;
}

std::vector<std::size_t> model_subset(const std::vector<double>& ys, std::size_t cap) {
  const std::size_t n = ys.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (cap == 0 || n <= cap) return all;

  std::vector<std::size_t> by_value = all;
  std::stable_sort(by_value.begin(), by_value.end(), [&](std::size_t a, std::size_t b) { return ys[a] > ys[b]; });
  std::vector<bool> taken(n, false);
  std::size_t count = 0;
  for (std::size_t k = 0; k < (cap + 1) / 2; ++k) {
    taken[by_value[k]] = true;
    ++count;
  }
  for (std::size_t i = n; i-- > 0 && count < cap;) {
    if (!taken[i]) {
      taken[i] = true;
      ++count;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < n; ++i) {
    if (taken[i]) out.push_back(i);
  }
  return out;
}

GpModel fit_model(const BoState& state) {
  if (state.ys.empty()) return GpModel{};
  const auto subset = model_subset(state.ys, state.config.max_model_points);
  std::vector<Point> points;
  std::vector<double> values;
  points.reserve(subset.size());
  values.reserve(subset.size());
  for (std::size_t i : subset) {
    points.push_back(to_unit_cube(state.xs[i], state.bounds));
    values.push_back(state.ys[i]);
  }
  return GpModel::fit(points, values, state.config.gp);
}

std::size_t argmax_expected_improvement(const GpModel& model, const Eigen::MatrixXd& candidates, double best) {
  const auto predictions = model.predict(candidates);
  std::size_t arg = 0;
  double top = -1.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double ei = expected_improvement(predictions[i].mean, predictions[i].variance, best);
    if (ei > top) {
      top = ei;
      arg = i;
    }
  }
  return arg;
}

Point suggest(BoState& state) {
  if (!state.init_design.empty()) {
    Point next = std::move(state.init_design.front());
    state.init_design.pop_front();
    return next;
  }
  const std::size_t d = state.bounds.dim();
  if (d == 0) return {};

  const auto& cfg = state.config;
  const std::size_t local = state.incumbent ? cfg.neighborhood : 0;
  Eigen::MatrixXd candidates(static_cast<Eigen::Index>(cfg.candidates + local), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < cfg.candidates; ++i) {
    for (std::size_t j = 0; j < d; ++j) candidates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = state.rng.uniform();
  }
  if (local > 0) {
    const Point center = to_unit_cube(state.incumbent->x, state.bounds);
    for (std::size_t i = 0; i < local; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double v = center[j] + cfg.neighborhood_scale * state.rng.normal();
        candidates(static_cast<Eigen::Index>(cfg.candidates + i), static_cast<Eigen::Index>(j)) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  if (candidates.rows() == 0) return from_unit_cube(Point(d, 0.5), state.bounds);

  std::size_t pick = 0;
  if (state.incumbent) {
    const GpModel model = fit_model(state);
    pick = argmax_expected_improvement(model, candidates, state.incumbent->y);
  }
  Point u(d);
  for (std::size_t j = 0; j < d; ++j) u[j] = candidates(static_cast<Eigen::Index>(pick), static_cast<Eigen::Index>(j));
  return from_unit_cube(u, state.bounds);
}

void observe(BoState& state, const Point& x, double y) {
  if (!state.bounds.contains(x)) throw InvalidArgument("observe: point outside the optimizer's bounds");
  if (!std::isfinite(y)) throw InvalidArgument("observe: value must be finite");
  Point stored(x);
  for (std::size_t i = 0; i < stored.size(); ++i)
    stored[i] = std::clamp(stored[i], state.bounds.lower[i], state.bounds.upper[i]);
  if (!state.incumbent || y > state.incumbent->y) state.incumbent = Incumbent{stored, y};
  state.xs.push_back(std::move(stored));
  state.ys.push_back(y);
  ++state.eval_count;
}

double reward_of(const BoState& state) {
  if (!state.incumbent) throw Error("reward_of: arm has no observations");
  return state.incumbent->y;
}

nlohmann::json to_json(const BoState& state) {
  nlohmann::json incumbent = nullptr;
  if (state.incumbent) incumbent = {{"x", state.incumbent->x}, {"y", state.incumbent->y}};
  return {{"format", kBoFormat},
          {"version", kBoStateVersion},
          {"bounds", {{"lower", state.bounds.lower}, {"upper", state.bounds.upper}}},
          {"config", config_to_json(state.config)},
          {"xs", state.xs},
          {"ys", state.ys},
          {"incumbent", incumbent},
          {"init_design", std::vector<Point>(state.init_design.begin(), state.init_design.end())},
          {"rng", state.rng.state()},
          {"eval_count", state.eval_count}};
}

BoState bo_state_from_json(const nlohmann::json& j) {
  check_format(j, kBoFormat);
  try {
    BoState state;
    state.bounds.lower = j.at("bounds").at("lower").get<Point>();
    state.bounds.upper = j.at("bounds").at("upper").get<Point>();
    state.config = config_from_json(j.at("config"));
    state.xs = j.at("xs").get<std::vector<Point>>();
    state.ys = j.at("ys").get<std::vector<double>>();
    if (!j.at("incumbent").is_null()) {
      state.incumbent = Incumbent{j["incumbent"].at("x").get<Point>(), j["incumbent"].at("y").get<double>()};
    }
    for (auto& p : j.at("init_design").get<std::vector<Point>>()) state.init_design.push_back(std::move(p));
    state.rng.restore(j.at("rng").get<std::string>());
    state.eval_count = j.at("eval_count").get<std::size_t>();
    if (state.xs.size() != state.ys.size() || state.eval_count != state.ys.size() ||
        state.bounds.lower.size() != state.bounds.upper.size())
      throw SerializationError("inconsistent BO state payload");
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt BO state: ") + e.what());
  }
}

std::string serialize(const BoState& state) { return to_json(state).dump(); }

BoState deserialize(const std::string& payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt BO state: ") + e.what());
  }
  return bo_state_from_json(j);
}

std::optional<double> BayesianOptimizer::best_value() const {
  if (!state_.incumbent) return std::nullopt;
  return state_.incumbent->y;
}

nlohmann::json BayesianOptimizer::to_json() const { return hybridopt::to_json(state_); }

Point RandomContinuousOptimizer::suggest() {
  Point x(bounds_.dim());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng_.uniform(bounds_.lower[i], bounds_.upper[i]);
  return x;
}

void RandomContinuousOptimizer::observe(const Point& x, double y) {
  if (!bounds_.contains(x)) throw InvalidArgument("observe: point outside the optimizer's bounds");
  if (!std::isfinite(y)) throw InvalidArgument("observe: value must be finite");
  if (!best_ || y > *best_) best_ = y;
  ++count_;
}

nlohmann::json RandomContinuousOptimizer::to_json() const {
  nlohmann::json best = nullptr;
  if (best_) best = *best_;
  return {{"format", kRandomFormat},
          {"version", kBoStateVersion},
          {"bounds", {{"lower", bounds_.lower}, {"upper", bounds_.upper}}},
          {"rng", rng_.state()},
          {"best", best},
          {"count", count_}};
}

RandomContinuousOptimizer RandomContinuousOptimizer::from_json(const nlohmann::json& j) {
  check_format(j, kRandomFormat);
  try {
    Box bounds{j.at("bounds").at("lower").get<Point>(), j.at("bounds").at("upper").get<Point>()};
    RandomContinuousOptimizer opt(std::move(bounds), 0);
    opt.rng_.restore(j.at("rng").get<std::string>());
    if (!j.at("best").is_null()) opt.best_ = j["best"].get<double>();
    opt.count_ = j.at("count").get<std::size_t>();
    return opt;
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt random solver state: ") + e.what());
  }
}

std::unique_ptr<ContinuousOptimizer> make_continuous_optimizer(ContinuousSolverKind kind, const Box& bounds,
                                                               std::uint64_t seed, const BoConfig& config) {
  switch (kind) {
    case ContinuousSolverKind::bayesian:
      return std::make_unique<BayesianOptimizer>(make_bo_state(bounds, seed, config));
    case ContinuousSolverKind::random:
      return std::make_unique<RandomContinuousOptimizer>(bounds, seed);
  }
  throw InvalidArgument("unknown continuous solver kind");
}

std::unique_ptr<ContinuousOptimizer> load_continuous_optimizer(const nlohmann::json& j) {
  const std::string format = j.is_object() ? j.value("format", std::string{}) : std::string{};
  if (format == kBoFormat) return std::make_unique<BayesianOptimizer>(bo_state_from_json(j));
  if (format == kRandomFormat) return std::make_unique<RandomContinuousOptimizer>(RandomContinuousOptimizer::from_json(j));
  throw SerializationError("unknown continuous solver payload format '" + format + "'");
}

}  // namespace hybridopt
