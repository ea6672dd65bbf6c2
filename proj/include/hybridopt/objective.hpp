#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybridopt/space.hpp"

namespace hybridopt {

/// Location and value of a known global maximum.
struct KnownOptimum {
  double value = 0.0;
  std::vector<double> arm_values;
  Point x;
};

/// One objective evaluation inside a run.
struct EvaluationRecord {
  Arm arm;
  Point x;
  double value = 0.0;
  std::size_t eval_index = 0;  // 1-based, strictly increasing within a run
};

/// Black-box objective f(arm, x) to be maximized.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual const MixedSpace& space() const = 0;
  virtual double evaluate(const Arm& arm, std::span<const double> x) const = 0;
  virtual std::optional<KnownOptimum> known_optimum() const { return std::nullopt; }
  /// Whether evaluate may be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }
};

// Ten-term Shekel sum; x1, x2 are the integer coordinates of the mixed
// benchmark. The outer sum covers all ten (c_i, a_i) pairs.
double shekel(double x1, double x2, double x3, double x4);
inline constexpr double kShekelOptimum = 10.536283726219603;

double rastrigin(double x, double y);
double ackley(double x, double y);
double sphere(double x, double y);

/// -Rastrigin for u = 0, 10 - Ackley for u = 1, 20 - Sphere for u = 2.
double composition(int u, double x, double y);
inline constexpr double kCompositionOptimum = 20.0;

inline constexpr std::array<int, 5> kPermU{7, 1, 13, 10, 4};
inline constexpr std::array<int, 5> kPermV{13, 1, 4, 7, 10};
inline constexpr std::array<int, 5> kPermW{7, 4, 10, 1, 13};

/// Element following `value` in `table`, wrapping from the last to the first.
int perm_next(std::span<const int, 5> table, int value);

double sine_permutation_g(double x, double y);
double sine_permutation(int u, int v, int w, double x, double y);

// Maximum of the sine-permutation benchmark: the three permutations map
// (7, 13, 10) to 1 each, the inner argument is sqrt(26), and y solves
// sin(...) = 1 on the lower branch. Confirmed by brute force over all 125
// triples on a 400 x 300 grid with local refinement.
inline constexpr double kSinePermutationOptimum = 5.049509756796392;
inline constexpr double kSinePermutationArgX = 2.0990195135927848;
inline constexpr double kSinePermutationArgY = 2.2354244675557205;

/// Names of the built-in synthetic benchmarks.
std::vector<std::string> synthetic_function_names();

/// Builds a synthetic benchmark by name; throws InvalidArgument naming the
/// available functions when the name is unknown.
std::unique_ptr<Objective> make_synthetic_objective(const std::string& name);

MixedSpace shekel_space();
MixedSpace composition_space();
MixedSpace sine_permutation_space();

}  // namespace hybridopt
