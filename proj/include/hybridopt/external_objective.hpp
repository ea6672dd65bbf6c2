#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

#include "hybridopt/objective.hpp"

namespace hybridopt {

/// Request body sent to an external objective:
/// {"discrete": {name: value, ...}, "continuous": {name: value, ...}}.
/// Integral discrete values are written as JSON integers.
nlohmann::json external_request(const MixedSpace& space, const Arm& arm, std::span<const double> x);

/// Parses {"value": <real>} from a command's standard output.
double parse_external_response(const std::string& stdout_text);

/// Runs `command` once through /bin/sh, feeding the request on stdin and
/// reading the response from stdout. Nonzero exit, malformed output and
/// timeouts raise EvaluationError with the captured stderr attached.
double external_objective(const std::string& command, const MixedSpace& space, const Arm& arm,
                          std::span<const double> x, std::chrono::milliseconds timeout);

struct ExternalObjectiveSpec {
  std::string name = "external";
  std::string command;
  std::chrono::milliseconds timeout{60'000};
  std::optional<KnownOptimum> known_optimum;
  bool concurrent_safe = false;
};

/// Objective backed by an external command, one process per evaluation.
class ExternalObjective final : public Objective {
 public:
  ExternalObjective(MixedSpace space, ExternalObjectiveSpec spec);

  std::string name() const override { return spec_.name; }
  const MixedSpace& space() const override { return space_; }
  double evaluate(const Arm& arm, std::span<const double> x) const override;
  std::optional<KnownOptimum> known_optimum() const override { return spec_.known_optimum; }
  bool concurrent_safe() const override { return spec_.concurrent_safe; }

  const ExternalObjectiveSpec& spec() const { return spec_; }

 private:
  MixedSpace space_;
  ExternalObjectiveSpec spec_;
};

}  // namespace hybridopt
