#include "hybridopt/bandit.hpp"

#include <algorithm>
#include <cmath>

#include "hybridopt/error.hpp"

namespace hybridopt {

BanditState BanditState::uniform(std::size_t arms, double alpha) {
  if (arms == 0) throw InvalidArgument("bandit needs at least one arm");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("bandit step size must be positive");
  BanditState state;
  state.preferences.assign(arms, 0.0);
  state.alpha = alpha;
  return state;
}

std::vector<double> action_probabilities(const BanditState& state) {
  const auto& h = state.preferences;
  if (h.empty()) throw InvalidArgument("action_probabilities: no arms");
  const double top = *std::max_element(h.begin(), h.end());
  std::vector<double> pi(h.size());
  double total = 0.0;
  for (std::size_t a = 0; a < h.size(); ++a) {
    pi[a] = std::exp(h[a] - top);
    total += pi[a];
  }
  for (double& p : pi) p /= total;
  return pi;
}

std::size_t sample_index(const std::vector<double>& probabilities, double u) {
  double cumulative = 0.0;
  for (std::size_t a = 0; a < probabilities.size(); ++a) {
    cumulative += probabilities[a];
    if (u < cumulative) return a;
  }
  // Rounding left the total a hair below u; take the last arm with mass.
  for (std::size_t a = probabilities.size(); a-- > 0;) {
    if (probabilities[a] > 0.0) return a;
  }
  return 0;
}

std::size_t sample_action(const BanditState& state, Rng& rng) {
  if (state.preferences.size() == 1) {
    rng.uniform();  // keep one draw per step regardless of arm count
    return 0;
  }
  return sample_index(action_probabilities(state), rng.uniform());
}

void update(BanditState& state, std::size_t action, double reward) {
  if (!std::isfinite(reward)) throw InvalidArgument("bandit reward must be finite");
  if (action >= state.preferences.size()) throw InvalidArgument("bandit action out of range");
  const std::vector<double> pi = action_probabilities(state);
  ++state.step;
  state.mean_reward += (reward - state.mean_reward) / static_cast<double>(state.step);
  const double advantage = state.alpha * (reward - state.mean_reward);
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (a == action) {
      state.preferences[a] += advantage * (1.0 - pi[a]);
    } else {
      state.preferences[a] -= advantage * pi[a];
    }
  }
}

nlohmann::json to_json(const BanditState& state) {
  return {{"preferences", state.preferences},
          {"step", state.step},
          {"mean_reward", state.mean_reward},
          {"alpha", state.alpha}};
}

BanditState bandit_from_json(const nlohmann::json& j) {
  try {
    BanditState state;
    state.preferences = j.at("preferences").get<std::vector<double>>();
    state.step = j.at("step").get<std::int64_t>();
    state.mean_reward = j.at("mean_reward").get<double>();
    state.alpha = j.at("alpha").get<double>();
    if (state.preferences.empty() || state.step < 0 || !(state.alpha > 0.0))
      throw SerializationError("invalid bandit state");
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt bandit state: ") + e.what());
  }
}

}  // namespace hybridopt
