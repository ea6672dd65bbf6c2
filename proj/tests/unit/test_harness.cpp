#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "hybridopt/error.hpp"
#include "hybridopt/experiment.hpp"
#include "hybridopt/plot.hpp"
#include "hybridopt/stats.hpp"

using namespace hybridopt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hybridopt_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& out) {
  nlohmann::json j = {{"function", "composition"}, {"methods", {"hybrid", "random_search"}},
                      {"iters", 12},               {"n", 2},
                      {"seeds", {1, 2, 3}},        {"output_dir", out.string()},
                      {"record_wall_time", false}};
  return config_from_json(j);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

boost::property_tree::ptree parse_xml(const std::string& svg) {
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

}  // namespace

TEST_CASE("rolling average") {
  const std::vector<double> s{1, 2, 3, 4};
  CHECK(rolling_average(s, 2) == std::vector<double>{1, 1.5, 2.5, 3.5});
  CHECK(rolling_average(s, 1) == s);
  const std::vector<double> c(17, 3.25);
  for (std::size_t w : {1, 2, 5, 50}) CHECK(rolling_average(c, w) == c);
  CHECK_THROWS(rolling_average(s, 0));
  for (std::size_t n = 0; n < 30; ++n)
    for (std::size_t w = 1; w < 40; w += 3) CHECK(rolling_average(std::vector<double>(n, 1.0), w).size() == n);
}

TEST_CASE("cross-seed statistics") {
  const std::vector<double> b{10, 12};
  CHECK(mean(b) == 11);
  CHECK(sample_std(b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sample_std(std::vector<double>{7}) == 0);
}

TEST_CASE("config parsing") {
  const auto c = config_from_json({{"function", "shekel"}, {"method", "rounded_bo"}, {"iters", 5}});
  CHECK(c.function.name == "shekel");
  CHECK(c.methods == std::vector<Method>{Method::rounded_bo});
  CHECK(c.rolling_window == 50);
  CHECK_THROWS_AS(config_from_json({{"function", "shekel"}, {"seeds", nlohmann::json::array()}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"function", "shekel"}, {"iters", 0}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"function", "shekel"}, {"method", "annealing"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"function", "shekel"}, {"iter", 5}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"function", "shekel"}, {"iters", "many"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"iters", 5}}), InvalidArgument);

  const auto ext = config_from_json(
      {{"function",
        {{"name", "toy"},
         {"command", "true"},
         {"timeout_ms", 250},
         {"space", {{"discrete", {{{"name", "k"}, {"values", {1, 2}}}}}, {"continuous", {{{"name", "x"}, {"lower", 0}, {"upper", 1}}}}}},
         {"known_optimum", {{"value", 3}, {"arm", {2}}, {"x", {0.5}}}}}}});
  REQUIRE(ext.function.external);
  CHECK(ext.function.external->timeout.count() == 250);
  CHECK(ext.function.space->discrete_dim() == 1);
  CHECK(ext.function.external->known_optimum->value == 3);
  const auto round_trip = config_from_json(to_json(ext));
  CHECK(to_json(round_trip) == to_json(ext));
}

TEST_CASE("run writes one file per seed plus a manifest") {
  const auto out = scratch("run");
  auto cfg = small_config(out);
  cfg.methods = {Method::hybrid};
  const auto result = run_experiment(cfg);
  CHECK(result.runs.size() == 3);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) files += e.path().extension() == ".jsonl";
  CHECK(files == 3);
  const auto manifest = load_json_file(out / "manifest.json");
  CHECK(manifest["format"] == "hybridopt.manifest");
  CHECK(manifest["function"]["known_optimum"]["value"] == 20.0);
  CHECK(manifest["runs"].size() == 3);
  fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  auto ca = small_config(a), cb = small_config(b);
  run_experiment(ca);
  run_experiment(cb);
  for (const auto m : {Method::hybrid, Method::random_search})
    for (std::uint64_t s : {1, 2, 3}) CHECK(slurp(a / trajectory_file_name(m, s)) == slurp(b / trajectory_file_name(m, s)));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("parallel runs match serial runs") {
  const auto a = scratch("par_a"), b = scratch("par_b");
  auto ca = small_config(a), cb = small_config(b);
  cb.parallel = true;
  run_experiment(ca);
  run_experiment(cb);
  for (std::uint64_t s : {1, 2, 3})
    CHECK(slurp(a / trajectory_file_name(Method::hybrid, s)) == slurp(b / trajectory_file_name(Method::hybrid, s)));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("trajectory invariants") {
  const auto out = scratch("inv");
  auto cfg = small_config(out);
  cfg.methods = all_methods();
  cfg.iters = 30;
  run_experiment(cfg);
  for (const auto m : all_methods()) {
    for (std::uint64_t s : cfg.seeds) {
      const auto rows = read_trajectory(out / trajectory_file_name(m, s));
      REQUIRE(rows.size() == (m == Method::hybrid ? cfg.iters : cfg.iters * cfg.n));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        REQUIRE(r.gap);
        CHECK(*r.gap == std::fabs(20.0 - r.best_so_far));
        CHECK(r.wall_ms == 0.0);
        if (m == Method::hybrid) CHECK(r.eval_index == cfg.n * (r.t + 1));
        if (i > 0) {
          CHECK(r.eval_index > rows[i - 1].eval_index);
          CHECK(r.best_so_far >= rows[i - 1].best_so_far);
          CHECK(*r.gap <= *rows[i - 1].gap);
        }
      }
    }
  }
  fs::remove_all(out);
}

TEST_CASE("errors are reported before any evaluation") {
  const auto out = scratch("errors");
  nlohmann::json j = {{"function", "rosenbrock"}, {"output_dir", out.string()}};
  try {
    run_experiment(config_from_json(j));
    FAIL("expected error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("sine_permutation") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(out));

  fs::create_directories(out);
  std::ofstream(out / "file") << "x";
  auto cfg = small_config(out / "file" / "sub");
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  fs::remove_all(out);
}

TEST_CASE("summaries") {
  const auto out = scratch("summary");
  run_experiment(small_config(out));
  const auto stats = summarize(out);
  REQUIRE(stats.size() == 2);
  const std::string csv = summary_csv(stats);
  CHECK(csv == summary_csv(summarize(out)));
  CHECK(csv.substr(0, csv.find('\n')) == kSummaryHeader);
  for (const auto& s : stats) {
    CHECK(s.bests.size() == 3);
    CHECK(s.std_best >= 0.0);
    CHECK(s.mean_best == doctest::Approx(mean(s.bests)));
    CHECK(s.total_evals == 3 * 24);
    CHECK_FALSE(s.single_seed);
    CHECK(*s.min_final_gap <= *s.mean_final_gap);
  }

  const auto single = scratch("summary_single");
  auto one = small_config(single);
  one.seeds = {5};
  one.methods = {Method::hybrid};
  run_experiment(one);
  const auto s1 = summarize(single);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].std_best == 0.0);
  CHECK(s1[0].single_seed);
  CHECK(summary_csv(s1).find(",1\n") != std::string::npos);

  // A compatible second manifest adds seeds; an incompatible one is an error.
  const auto merged = scratch("summary_merged");
  auto part1 = small_config(merged / "a");
  part1.seeds = {1};
  auto part2 = small_config(merged / "b");
  part2.seeds = {2};
  run_experiment(part1);
  run_experiment(part2);
  CHECK(summarize(merged)[0].bests.size() == 2);
  auto part3 = small_config(merged / "c");
  part3.seeds = {3};
  part3.iters = 5;
  run_experiment(part3);
  CHECK_THROWS_AS(summarize(merged), Error);
  auto dup = small_config(merged / "d");
  dup.seeds = {1};
  fs::remove_all(merged / "c");
  run_experiment(dup);
  CHECK_THROWS_AS(summarize(merged), Error);
  fs::remove_all(out);
  fs::remove_all(single);
  fs::remove_all(merged);
}

TEST_CASE("svg rendering") {
  PlotSpec spec;
  spec.title = "a <b> & \"c\"";
  spec.y_label = "gap";
  spec.rolling_window = 3;
  spec.series = {{"s1", std::vector<double>(40, 2.5)}, {"s2", {1, 2, 3, 4, 5}}};
  const std::string svg = render_svg(spec);
  CHECK_NOTHROW(parse_xml(svg));
  CHECK(count(svg, "<circle") == 45);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("a &lt;b&gt; &amp; &quot;c&quot;") != std::string::npos);
  CHECK(svg.find(">iterations<") != std::string::npos);
  CHECK(svg.find(">gap<") != std::string::npos);

  // a constant series draws a flat rolling line
  const auto tree = parse_xml(svg);
  std::set<std::string> ys;
  for (const auto& [tag, node] : tree.get_child("svg")) {
    if (tag != "g" || node.get<std::string>("<xmlattr>.id", "") != "rolling") continue;
    const auto& line = node.get_child("polyline");
    std::istringstream pts(line.get<std::string>("<xmlattr>.points"));
    std::string p;
    while (pts >> p) ys.insert(p.substr(p.find(',') + 1));
    break;
  }
  CHECK(ys.size() == 1);

  PlotSpec empty;
  empty.title = "nothing";
  const std::string e = render_svg(empty);
  CHECK_NOTHROW(parse_xml(e));
  CHECK(e.find("empty input") != std::string::npos);
  CHECK(count(e, "<circle") == 0);
}

TEST_CASE("plot directory") {
  const auto out = scratch("plot");
  run_experiment(small_config(out));
  const auto files = plot_directory(out, out / "plots");
  REQUIRE(files.size() == 2);
  for (const auto& f : files) {
    const std::string svg = slurp(f);
    CHECK_NOTHROW(parse_xml(svg));
    CHECK(count(svg, "<circle") == (f.filename().string().find("hybrid") != std::string::npos ? 36u : 72u));
  }
  const auto empty = scratch("plot_empty");
  fs::create_directories(empty);
  const auto none = plot_directory(empty, empty / "plots");
  REQUIRE(none.size() == 1);
  CHECK(slurp(none[0]).find("empty input") != std::string::npos);
  fs::remove_all(out);
  fs::remove_all(empty);
}
