#include "hybridopt/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

constexpr double kBoundsTol = 1e-12;

void validate(const DiscreteVar& var) {
  if (var.name.empty()) throw InvalidArgument("discrete variable without a name");
  if (var.domain.empty()) throw InvalidArgument("discrete variable '" + var.name + "' has an empty domain");
  for (std::size_t i = 0; i < var.domain.size(); ++i) {
    if (!std::isfinite(var.domain[i]))
      throw InvalidArgument("discrete variable '" + var.name + "' has a non-finite value");
    if (i > 0 && !(var.domain[i - 1] < var.domain[i]))
      throw InvalidArgument("domain of '" + var.name + "' must be strictly increasing");
  }
}

void validate(const ContinuousVar& var) {
  if (var.name.empty()) throw InvalidArgument("continuous variable without a name");
  if (!std::isfinite(var.lower) || !std::isfinite(var.upper) || !(var.lower < var.upper))
    throw InvalidArgument("continuous variable '" + var.name + "' needs finite bounds with lower < upper");
}

// Position of value in domain, or npos.
std::size_t domain_position(const DiscreteVar& var, double value) {
  auto it = std::lower_bound(var.domain.begin(), var.domain.end(), value);
  if (it == var.domain.end() || *it != value) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - var.domain.begin());
}

}  // namespace

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) return false;
  }
  return true;
}

MixedSpace::MixedSpace(std::vector<DiscreteVar> discrete, std::vector<ContinuousVar> continuous)
    : discrete_(std::move(discrete)), continuous_(std::move(continuous)) {
  if (discrete_.empty() && continuous_.empty()) throw InvalidArgument("search space has no variables");
  std::set<std::string> names;
  for (const auto& v : discrete_) {
    validate(v);
    if (!names.insert(v.name).second) throw InvalidArgument("duplicate variable name '" + v.name + "'");
  }
  for (const auto& v : continuous_) {
    validate(v);
    if (!names.insert(v.name).second) throw InvalidArgument("duplicate variable name '" + v.name + "'");
  }
}

Box MixedSpace::continuous_box() const {
  Box box;
  for (const auto& v : continuous_) {
    box.lower.push_back(v.lower);
    box.upper.push_back(v.upper);
  }
  return box;
}

bool MixedSpace::contains(std::span<const double> arm_values, std::span<const double> x) const {
  if (arm_values.size() != discrete_.size()) return false;
  for (std::size_t i = 0; i < discrete_.size(); ++i) {
    if (domain_position(discrete_[i], arm_values[i]) == static_cast<std::size_t>(-1)) return false;
  }
  return continuous_box().contains(x, 0.0);
}

std::size_t arm_count(const MixedSpace& space, std::size_t cap) {
  std::size_t count = 1;
  for (const auto& v : space.discrete()) {
    const std::size_t size = v.domain.size();
    if (count > cap / size) {
      // Report the full product (saturating) so the message is useful.
      long double full = 1;
      for (const auto& w : space.discrete()) full *= static_cast<long double>(w.domain.size());
      throw InvalidArgument("arm count " + std::to_string(static_cast<unsigned long long>(
                                std::min<long double>(full, std::numeric_limits<unsigned long long>::max()))) +
                            " exceeds the cap of " + std::to_string(cap));
    }
    count *= size;
  }
  return count;
}

std::vector<Arm> enumerate_arms(const MixedSpace& space, std::size_t cap) {
  const std::size_t total = arm_count(space, cap);
  const auto& vars = space.discrete();
  std::vector<Arm> arms;
  arms.reserve(total);
  std::vector<std::size_t> digit(vars.size(), 0);
  for (std::size_t index = 0; index < total; ++index) {
    Arm arm;
    arm.index = index;
    arm.values.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) arm.values.push_back(vars[i].domain[digit[i]]);
    arms.push_back(std::move(arm));
    // Odometer increment, last variable fastest.
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++digit[i] < vars[i].domain.size()) break;
      digit[i] = 0;
    }
  }
  return arms;
}

Arm make_arm(const MixedSpace& space, std::span<const double> values) {
  const auto& vars = space.discrete();
  if (values.size() != vars.size()) throw InvalidArgument("arm has the wrong number of values");
  Arm arm;
  arm.values.assign(values.begin(), values.end());
  std::size_t index = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::size_t pos = domain_position(vars[i], values[i]);
    if (pos == static_cast<std::size_t>(-1))
      throw InvalidArgument("value " + std::to_string(values[i]) + " is not in the domain of '" + vars[i].name + "'");
    index = index * vars[i].domain.size() + pos;
  }
  arm.index = index;
  return arm;
}

double round_to_domain(double value, const DiscreteVar& var) {
  const auto& d = var.domain;
  auto it = std::lower_bound(d.begin(), d.end(), value);
  if (it == d.begin()) return d.front();
  if (it == d.end()) return d.back();
  const double above = *it;
  const double below = *(it - 1);
  return (above - value < value - below) ? above : below;
}

DiscreteVar discretize_continuous(const ContinuousVar& var, std::size_t k) {
  if (k == 0) throw InvalidArgument("discretize_continuous: k must be positive");
  DiscreteVar out{var.name, {}};
  if (k == 1) {
    out.domain.push_back(0.5 * (var.lower + var.upper));
    return out;
  }
  const double step = (var.upper - var.lower) / static_cast<double>(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) out.domain.push_back(var.lower + static_cast<double>(i) * step);
  out.domain.push_back(var.upper);
  return out;
}

Point to_unit_cube(std::span<const double> x, const Box& box) {
  if (x.size() != box.dim()) throw InvalidArgument("to_unit_cube: dimension mismatch");
  Point u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = box.lower[i], hi = box.upper[i];
    if (!(x[i] >= lo - kBoundsTol && x[i] <= hi + kBoundsTol))
      throw InvalidArgument("point coordinate " + std::to_string(i) + " = " + std::to_string(x[i]) + " is out of bounds");
    u[i] = std::clamp((x[i] - lo) / (hi - lo), 0.0, 1.0);
  }
  return u;
}

Point from_unit_cube(std::span<const double> u, const Box& box) {
  if (u.size() != box.dim()) throw InvalidArgument("from_unit_cube: dimension mismatch");
  Point x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    x[i] = std::clamp(box.lower[i] + u[i] * (box.upper[i] - box.lower[i]), box.lower[i], box.upper[i]);
  }
  return x;
}

}  // namespace hybridopt
