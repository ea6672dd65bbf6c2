#include "hybridopt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

constexpr std::array<double, 10> kShekelC{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

// Rows 3-4 repeat rows 1-2.
constexpr std::array<std::array<double, 10>, 4> kShekelA{{
    {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
    {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
}};

std::vector<double> integer_range(int lo, int hi) {
  std::vector<double> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

class ShekelObjective final : public Objective {
 public:
  std::string name() const override { return "shekel"; }
  const MixedSpace& space() const override { return space_; }
  double evaluate(const Arm& arm, std::span<const double> x) const override {
    return shekel(arm.values.at(0), arm.values.at(1), x[0], x[1]);
  }
  std::optional<KnownOptimum> known_optimum() const override {
    return KnownOptimum{kShekelOptimum, {4, 4}, {4, 4}};
  }

 private:
  MixedSpace space_ = shekel_space();
};

class CompositionObjective final : public Objective {
 public:
  std::string name() const override { return "composition"; }
  const MixedSpace& space() const override { return space_; }
  double evaluate(const Arm& arm, std::span<const double> x) const override {
    return composition(static_cast<int>(arm.values.at(0)), arm.values.at(1), x[0]);
  }
  std::optional<KnownOptimum> known_optimum() const override {
    return KnownOptimum{kCompositionOptimum, {2, 0}, {0}};
  }

 private:
  MixedSpace space_ = composition_space();
};

class SinePermutationObjective final : public Objective {
 public:
  std::string name() const override { return "sine_permutation"; }
  const MixedSpace& space() const override { return space_; }
  double evaluate(const Arm& arm, std::span<const double> x) const override {
    return sine_permutation(static_cast<int>(arm.values.at(0)), static_cast<int>(arm.values.at(1)),
                            static_cast<int>(arm.values.at(2)), x[0], x[1]);
  }
  std::optional<KnownOptimum> known_optimum() const override {
    return KnownOptimum{kSinePermutationOptimum, {7, 13, 10}, {kSinePermutationArgX, kSinePermutationArgY}};
  }

 private:
  MixedSpace space_ = sine_permutation_space();
};

}  // namespace

double shekel(double x1, double x2, double x3, double x4) {
  const std::array<double, 4> x{x1, x2, x3, x4};
  double total = 0.0;
  for (std::size_t i = 0; i < kShekelC.size(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = x[j] - kShekelA[j][i];
      sq += d * d;
    }
    total += 1.0 / (kShekelC[i] + sq);
  }
  return total;
}

double rastrigin(double x, double y) {
  const double two_pi = 2.0 * std::numbers::pi;
  return 20.0 + (x * x - 10.0 * std::cos(two_pi * x)) + (y * y - 10.0 * std::cos(two_pi * y));
}

double ackley(double x, double y) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = -20.0 * std::exp(-0.2 * std::sqrt(0.5 * (x * x + y * y)));
  const double b = std::exp(0.5 * (std::cos(two_pi * x) + std::cos(two_pi * y)));
  // Grouped so the origin evaluates to exactly 0.
  return (a + 20.0) + (std::exp(1.0) - b);
}

double sphere(double x, double y) { return x * x + y * y; }

double composition(int u, double x, double y) {
  switch (u) {
    case 0:
      return -rastrigin(x, y);
    case 1:
      return -ackley(x, y) + 10.0;
    case 2:
      return -sphere(x, y) + 20.0;
    default:
      throw InvalidArgument("composition: u must be 0, 1 or 2 (got " + std::to_string(u) + ")");
  }
}

int perm_next(std::span<const int, 5> table, int value) {
  auto it = std::find(table.begin(), table.end(), value);
  if (it == table.end()) throw InvalidArgument("permutation argument " + std::to_string(value) + " is not in {1,4,7,10,13}");
  ++it;
  return it == table.end() ? table.front() : *it;
}

double sine_permutation_g(double x, double y) {
  const double shift = -x + 7.0;
  const double dy = y - 4.0;
  return x * std::sin(shift * shift * std::numbers::pi / (2.0 * dy * dy + 1.0)) / ((x - 5.0) * (x - 5.0) + 1.0);
}

double sine_permutation(int u, int v, int w, double x, double y) {
  const int s = perm_next(kPermU, u) + perm_next(kPermV, v) + perm_next(kPermW, w);
  return sine_permutation_g(static_cast<double>(s) + x, y);
}

MixedSpace shekel_space() {
  return MixedSpace({{"x1", integer_range(0, 10)}, {"x2", integer_range(0, 10)}},
                    {{"x3", 0.0, 10.0}, {"x4", 0.0, 10.0}});
}

MixedSpace composition_space() {
  return MixedSpace({{"u", integer_range(0, 2)}, {"x", integer_range(-1, 3)}}, {{"y", -5.0, 5.0}});
}

MixedSpace sine_permutation_space() {
  const std::vector<double> domain{1, 4, 7, 10, 13};
  return MixedSpace({{"u", domain}, {"v", domain}, {"w", domain}}, {{"x", 0.5, 8.0}, {"y", 0.1, 5.0}});
}

std::vector<std::string> synthetic_function_names() { return {"shekel", "composition", "sine_permutation"}; }

std::unique_ptr<Objective> make_synthetic_objective(const std::string& name) {
  if (name == "shekel") return std::make_unique<ShekelObjective>();
  if (name == "composition") return std::make_unique<CompositionObjective>();
  if (name == "sine_permutation") return std::make_unique<SinePermutationObjective>();
  std::string known;
  for (const auto& n : synthetic_function_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown function '" + name + "' (available: " + known + ", or an external command)");
}

}  // namespace hybridopt
