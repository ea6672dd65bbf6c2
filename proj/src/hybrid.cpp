#include "hybridopt/hybrid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

constexpr const char* kCheckpointFormat = "hybridopt.hybrid_checkpoint";
constexpr int kCheckpointVersion = 1;

std::string describe(const Arm& arm) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < arm.values.size(); ++i) out << (i ? ", " : "") << arm.values[i];
  out << ')';
  return out.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SerializationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError("corrupt checkpoint file " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace

void HybridConfig::validate() const {
  if (n < 1) throw InvalidArgument("hybrid: n must be at least 1");
  if (!(alpha > 0.0)) throw InvalidArgument("hybrid: alpha must be positive");
  if (stop_m < 1 || stop_T < 1) throw InvalidArgument("hybrid: stop_m and stop_T must be positive");
  if (stop_m > stop_T) throw InvalidArgument("hybrid: stop_m must not exceed stop_T");
  if (max_iters < 1) throw InvalidArgument("hybrid: max_iters must be at least 1");
  if (!(reward_tolerance >= 0.0)) throw InvalidArgument("hybrid: reward_tolerance must be non-negative");
}

bool should_stop(std::span<const StopEntry> history, const HybridConfig& config) {
  const std::size_t window = std::min(history.size(), config.stop_T);
  const auto recent = history.subspan(history.size() - window);
  for (const auto& probe : recent) {
    std::size_t count = 0;
    for (const auto& other : recent) {
      if (other.arm == probe.arm && std::fabs(other.reward - probe.reward) <= config.reward_tolerance) ++count;
    }
    if (count >= config.stop_m) return true;
  }
  return false;
}

bool should_stop(std::span<const IterationRecord> history, const HybridConfig& config) {
  std::vector<StopEntry> entries;
  entries.reserve(history.size());
  for (const auto& r : history) entries.push_back({r.arm.index, r.reward});
  return should_stop(std::span<const StopEntry>(entries), config);
}

HybridOptimizer::HybridOptimizer(const Objective& objective, HybridConfig config)
    : objective_(&objective), config_(std::move(config)) {
  config_.validate();
  arms_ = enumerate_arms(objective.space(), config_.arm_cap);
  bandit_ = BanditState::uniform(arms_.size(), config_.alpha);
  rng_ = Rng(derive_seed(config_.seed, "bandit"));
}

const ContinuousOptimizer* HybridOptimizer::cache_entry(std::size_t arm) const {
  auto it = cache_.find(arm);
  return it == cache_.end() ? nullptr : it->second.get();
}

IterationRecord HybridOptimizer::step() {
  const std::vector<double> pi = action_probabilities(bandit_);
  const std::size_t action = sample_index(pi, rng_.uniform());
  const Arm& arm = arms_[action];

  auto& entry = cache_[action];
  if (!entry) {
    entry = make_continuous_optimizer(config_.solver, objective_->space().continuous_box(),
                                      derive_seed(config_.seed, "arm", action), config_.bo);
  }

  IterationRecord record;
  record.t = t_;
  record.arm = arm;
  record.pi_selected = pi[action];
  for (std::size_t s = 0; s < config_.n; ++s) {
    const Point x = entry->suggest();
    double y = 0.0;
    try {
      y = objective_->evaluate(arm, x);
    } catch (const std::exception& e) {
      throw EvaluationError("iteration " + std::to_string(t_) + ", arm " + describe(arm) + ", step " +
                            std::to_string(s + 1) + "/" + std::to_string(config_.n) + ": " + e.what());
    }
    if (!std::isfinite(y)) {
      throw EvaluationError("iteration " + std::to_string(t_) + ", arm " + describe(arm) +
                            ": objective returned a non-finite value");
    }
    entry->observe(x, y);
    ++evals_;
    EvaluationRecord eval{arm, x, y, evals_};
    if (!best_ || y > best_->value) best_ = eval;
    record.evals.push_back(std::move(eval));
  }

  record.reward = *entry->best_value();
  update(bandit_, action, record.reward);
  record.best_so_far = best_->value;
  record.best_arm = best_->arm;
  record.best_x = best_->x;

  recent_.push_back({action, record.reward});
  while (recent_.size() > config_.stop_T) recent_.pop_front();
  ++t_;
  if (config_.stop_rule) {
    const std::vector<StopEntry> window(recent_.begin(), recent_.end());
    stopped_ = should_stop(std::span<const StopEntry>(window), config_);
  }
  return record;
}

std::vector<IterationRecord> HybridOptimizer::run(const std::function<void(const IterationRecord&)>& on_record) {
  std::vector<IterationRecord> records;
  while (!finished()) {
    records.push_back(step());
    if (on_record) on_record(records.back());
  }
  return records;
}

void HybridOptimizer::save_checkpoint(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir / "cache");
  nlohmann::json recent = nlohmann::json::array();
  for (const auto& e : recent_) recent.push_back({e.arm, e.reward});
  nlohmann::json best = nullptr;
  if (best_) {
    best = {{"arm", best_->arm.values}, {"x", best_->x}, {"value", best_->value}, {"eval_index", best_->eval_index}};
  }
  nlohmann::json cached = nlohmann::json::array();
  for (const auto& [arm, solver] : cache_) {
    write_json(dir / "cache" / ("arm_" + std::to_string(arm) + ".json"), solver->to_json());
    cached.push_back(arm);
  }
  write_json(dir / "hybrid.json", {{"format", kCheckpointFormat},
                                   {"version", kCheckpointVersion},
                                   {"seed", config_.seed},
                                   {"n", config_.n},
                                   {"arms", arms_.size()},
                                   {"t", t_},
                                   {"evaluations", evals_},
                                   {"stopped", stopped_},
                                   {"bandit", to_json(bandit_)},
                                   {"rng", rng_.state()},
                                   {"recent", recent},
                                   {"best", best},
                                   {"cached_arms", cached}});
}

HybridOptimizer HybridOptimizer::resume(const Objective& objective, HybridConfig config,
                                        const std::filesystem::path& dir) {
  HybridOptimizer opt(objective, std::move(config));
  const nlohmann::json j = read_json(dir / "hybrid.json");
  if (j.value("format", std::string{}) != kCheckpointFormat || j.value("version", -1) != kCheckpointVersion)
    throw SerializationError("unsupported hybrid checkpoint in " + dir.string());
  try {
    if (j.at("seed").get<std::uint64_t>() != opt.config_.seed || j.at("n").get<std::size_t>() != opt.config_.n ||
        j.at("arms").get<std::size_t>() != opt.arms_.size())
      throw InvalidArgument("checkpoint in " + dir.string() + " belongs to a different run configuration");
    opt.t_ = j.at("t").get<std::size_t>();
    opt.evals_ = j.at("evaluations").get<std::size_t>();
    opt.stopped_ = j.at("stopped").get<bool>();
    opt.bandit_ = bandit_from_json(j.at("bandit"));
    if (opt.bandit_.preferences.size() != opt.arms_.size())
      throw SerializationError("checkpoint bandit has the wrong number of arms");
    opt.rng_.restore(j.at("rng").get<std::string>());
    for (const auto& e : j.at("recent")) opt.recent_.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
    if (!j.at("best").is_null()) {
      const auto& b = j["best"];
      const auto values = b.at("arm").get<std::vector<double>>();
      opt.best_ = EvaluationRecord{make_arm(objective.space(), values), b.at("x").get<Point>(),
                                   b.at("value").get<double>(), b.at("eval_index").get<std::size_t>()};
    }
    for (const auto& a : j.at("cached_arms")) {
      const auto arm = a.get<std::size_t>();
      if (arm >= opt.arms_.size()) throw SerializationError("cached arm index out of range");
      opt.cache_[arm] = load_continuous_optimizer(read_json(dir / "cache" / ("arm_" + std::to_string(arm) + ".json")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt hybrid checkpoint: ") + e.what());
  }
  return opt;
}

std::vector<IterationRecord> run_hybrid(const Objective& objective, const HybridConfig& config) {
  HybridOptimizer opt(objective, config);
  return opt.run();
}

}  // namespace hybridopt
