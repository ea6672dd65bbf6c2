#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hybridopt/random.hpp"

namespace hybridopt {

/// Gradient bandit state: one preference per arm, a global reward baseline
/// and the step size.
///
/// The baseline is the mean of every reward seen so far *including* the one
/// being applied, so the very first update leaves the preferences untouched.
struct BanditState {
  std::vector<double> preferences;
  std::int64_t step = 0;
  double mean_reward = 0.0;
  double alpha = 0.1;

  static BanditState uniform(std::size_t arms, double alpha);
};

/// Softmax of the preferences, computed with the maximum subtracted.
std::vector<double> action_probabilities(const BanditState& state);

/// Inverse-CDF lookup of a uniform draw `u` in [0, 1) over `probabilities`.
std::size_t sample_index(const std::vector<double>& probabilities, double u);

std::size_t sample_action(const BanditState& state, Rng& rng);

/// Applies one softmax-gradient update for (action, reward). Preferences move
/// by alpha * (reward - mean) * (1[a == action] - pi(a)) with pi taken before
/// the update; the preference sum is conserved.
void update(BanditState& state, std::size_t action, double reward);

nlohmann::json to_json(const BanditState& state);
BanditState bandit_from_json(const nlohmann::json& j);

}  // namespace hybridopt
