#include <doctest.h>

#include <chrono>

#include "hybridopt/error.hpp"
#include "hybridopt/external_objective.hpp"

using namespace hybridopt;
using namespace std::chrono_literals;

namespace {

const std::string kData = HYBRIDOPT_TEST_DATA;

MixedSpace quad_space() { return MixedSpace({{"k", {0, 1, 2, 3, 4}}}, {{"x", 0, 3}}); }

std::string error_of(const std::string& script, std::chrono::milliseconds timeout = 5000ms) {
  const auto space = quad_space();
  try {
    external_objective(kData + "/" + script, space, make_arm(space, std::vector<double>{1}), Point{0.5}, timeout);
  } catch (const EvaluationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("request body") {
  const auto space = quad_space();
  const auto req = external_request(space, make_arm(space, std::vector<double>{2}), Point{0.25});
  CHECK(req.dump() == R"({"continuous":{"x":0.25},"discrete":{"k":2}})");
  const MixedSpace frac({{"r", {0.5, 1.5}}}, {});
  CHECK(external_request(frac, make_arm(frac, std::vector<double>{0.5}), Point{}).dump() ==
        R"({"continuous":{},"discrete":{"r":0.5}})");
}

TEST_CASE("response parsing") {
  CHECK(parse_external_response(R"({"value": 1.5})") == 1.5);
  CHECK(parse_external_response("{\"value\": -2}\n") == -2.0);
  CHECK_THROWS_AS(parse_external_response("noise line\n{\"value\": -2}\n"), EvaluationError);
  CHECK_THROWS_AS(parse_external_response("nope"), EvaluationError);
  CHECK_THROWS_AS(parse_external_response(R"({"val": 1})"), EvaluationError);
  CHECK_THROWS_AS(parse_external_response(R"({"value": "1"})"), EvaluationError);
}

TEST_CASE("fixed-value stub") {
  const auto space = quad_space();
  CHECK(external_objective(kData + "/fixed_value.sh", space, make_arm(space, std::vector<double>{0}), Point{1.0},
                           5000ms) == 1.5);
}

TEST_CASE("nonzero exit carries status and stderr") {
  const auto msg = error_of("fail.sh");
  CHECK(msg.find("status 3") != std::string::npos);
  CHECK(msg.find("model crashed") != std::string::npos);
}

TEST_CASE("timeout") {
  const auto start = std::chrono::steady_clock::now();
  const auto msg = error_of("slow.sh", 300ms);
  CHECK(msg.find("timed out after 300 ms") != std::string::npos);
  CHECK(std::chrono::steady_clock::now() - start < 5s);
}

TEST_CASE("malformed output") { CHECK(error_of("garbage.sh").find("malformed") != std::string::npos); }

TEST_CASE("the command receives the request on stdin") {
  const auto msg = error_of("echo_request.sh");
  CHECK(msg.find(R"({"continuous":{"x":0.5},"discrete":{"k":1}})") != std::string::npos);
}

TEST_CASE("missing command") {
  const auto msg = error_of("does_not_exist.sh");
  CHECK(msg.find("status 127") != std::string::npos);
}

TEST_CASE("external objective adapter") {
  ExternalObjectiveSpec spec;
  spec.command = "python3 " + kData + "/quadratic.py";
  spec.known_optimum = KnownOptimum{5.0, {2}, {1.5}};
  ExternalObjective f(quad_space(), spec);
  CHECK(f.name() == "external");
  CHECK_FALSE(f.concurrent_safe());
  CHECK(f.evaluate(make_arm(f.space(), std::vector<double>{2}), Point{1.5}) == 5.0);
  CHECK(f.evaluate(make_arm(f.space(), std::vector<double>{0}), Point{0.5}) == doctest::Approx(0.0));
}
