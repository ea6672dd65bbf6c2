#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hybridopt {

using Point = std::vector<double>;

/// Ordered, numeric domain of one discrete variable.
struct DiscreteVar {
  std::string name;
  std::vector<double> domain;  // strictly increasing, non-empty
};

struct ContinuousVar {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

/// Axis-aligned box over the continuous variables.
struct Box {
  Point lower;
  Point upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x, double tol = 1e-12) const;
};

/// One complete assignment of the discrete variables.
struct Arm {
  std::vector<double> values;  // one per discrete variable, in declaration order
  std::size_t index = 0;       // position in enumerate_arms order

  friend bool operator==(const Arm&, const Arm&) = default;
};

/// Mixed discrete/continuous search space. Validated on construction and
/// immutable afterwards.
class MixedSpace {
 public:
  MixedSpace(std::vector<DiscreteVar> discrete, std::vector<ContinuousVar> continuous);

  const std::vector<DiscreteVar>& discrete() const { return discrete_; }
  const std::vector<ContinuousVar>& continuous() const { return continuous_; }
  std::size_t discrete_dim() const { return discrete_.size(); }
  std::size_t continuous_dim() const { return continuous_.size(); }

  Box continuous_box() const;

  /// True when every discrete value is a domain member and x lies in the box.
  bool contains(std::span<const double> arm_values, std::span<const double> x) const;

 private:
  std::vector<DiscreteVar> discrete_;
  std::vector<ContinuousVar> continuous_;
};

inline constexpr std::size_t kDefaultArmCap = 1'000'000;

/// Number of arms, or throws InvalidArgument when it exceeds `cap`.
std::size_t arm_count(const MixedSpace& space, std::size_t cap = kDefaultArmCap);

/// Cartesian product of the discrete domains, lexicographic in declaration
/// order (the first variable varies slowest). A space without discrete
/// variables has exactly one empty arm.
std::vector<Arm> enumerate_arms(const MixedSpace& space, std::size_t cap = kDefaultArmCap);

/// Arm with the given values, index included. Throws if a value is not in
/// its domain.
Arm make_arm(const MixedSpace& space, std::span<const double> values);

/// Nearest domain member; ties go to the smaller member.
double round_to_domain(double value, const DiscreteVar& var);

/// k equally spaced values over [lower, upper] (endpoints included for
/// k >= 2, midpoint for k == 1).
DiscreteVar discretize_continuous(const ContinuousVar& var, std::size_t k);

/// Affine map of an in-bounds point to [0, 1]^d. Throws when a coordinate is
/// outside the box by more than 1e-12.
Point to_unit_cube(std::span<const double> x, const Box& box);
Point from_unit_cube(std::span<const double> u, const Box& box);

}  // namespace hybridopt
