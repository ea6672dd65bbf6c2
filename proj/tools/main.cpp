#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybridopt/experiment.hpp"
#include "hybridopt/objective.hpp"
#include "hybridopt/plot.hpp"

namespace fs = std::filesystem;
using namespace hybridopt;

namespace {

struct Overrides {
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> iters;
  std::vector<std::string> methods;
  std::optional<std::string> function;
  std::optional<std::string> output;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seeds, "Seed(s) replacing the config's seeds");
  cmd->add_option("--iters", o.iters, "Iterations per run");
  cmd->add_option("--method", o.methods, "Method(s) replacing the config's methods");
  cmd->add_option("--function", o.function, "Built-in function replacing the config's function");
  cmd->add_option("--output", o.output, "Output directory");
}

nlohmann::json with_overrides(nlohmann::json config, const Overrides& o) {
  if (!o.seeds.empty()) config["seeds"] = o.seeds;
  if (o.iters) config["iters"] = *o.iters;
  if (!o.methods.empty()) {
    config.erase("method");
    config["methods"] = o.methods;
  }
  if (o.function) {
    config.erase("functions");
    config["function"] = *o.function;
  }
  if (o.output) config["output_dir"] = *o.output;
  return config;
}

std::string values_text(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    std::ostringstream s;
    s.precision(17);
    s << v[i];
    out += s.str();
  }
  return out + ")";
}

void list_functions() {
  for (const auto& name : synthetic_function_names()) {
    const auto f = make_synthetic_objective(name);
    std::cout << name << "\n  space:";
    for (const auto& d : f->space().discrete()) std::cout << ' ' << d.name << " in " << values_text(d.domain);
    for (const auto& c : f->space().continuous())
      std::cout << ' ' << c.name << " in [" << c.lower << ", " << c.upper << "]";
    if (const auto opt = f->known_optimum()) {
      std::ostringstream v;
      v.precision(17);
      v << opt->value;
      std::cout << "\n  known maximum: " << v.str() << " at arm " << values_text(opt->arm_values) << ", x "
                << values_text(opt->x);
    }
    std::cout << '\n';
  }
}

void report(const ExperimentResult& r) {
  for (const auto& run : r.runs)
    std::cout << run.run_id << ": best " << run.best << " after " << run.evaluations << " evaluations\n";
  std::cout << "wrote " << r.manifest.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed discrete/continuous black-box optimizer (gradient bandit + per-arm Bayesian optimization)"};
  app.require_subcommand(1);

  app.add_subcommand("list-functions", "List built-in benchmark functions");

  std::string run_config;
  Overrides run_over;
  auto* run = app.add_subcommand("run", "Run the configured methods and seeds");
  run->add_option("config", run_config, "Config JSON file")->required();
  add_override_flags(run, run_over);

  std::string bench_config;
  Overrides bench_over;
  auto* bench = app.add_subcommand("bench", "Run every method (or the listed ones) on one or more functions");
  bench->add_option("config", bench_config, "Config JSON file")->required();
  add_override_flags(bench, bench_over);

  std::string summarize_dir;
  auto* summarize_cmd = app.add_subcommand("summarize", "Write summary.csv for the runs under a directory");
  summarize_cmd->add_option("dir", summarize_dir, "Output directory of run/bench")->required();

  std::string plot_dir, plot_out;
  auto* plot = app.add_subcommand("plot", "Write one SVG per (function, method)");
  plot->add_option("dir", plot_dir, "Output directory of run/bench")->required();
  plot->add_option("--out", plot_out, "Where to write the SVGs (default <dir>/plots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << failed->help();
    return 2;
  }

  try {
    if (app.got_subcommand("list-functions")) {
      list_functions();
    } else if (*run) {
      const auto config = config_from_json(with_overrides(load_json_file(run_config), run_over));
      report(run_experiment(config));
    } else if (*bench) {
      for (const auto& r : run_benchmark(with_overrides(load_json_file(bench_config), bench_over))) report(r);
    } else if (*summarize_cmd) {
      const std::string csv = summary_csv(summarize(summarize_dir));
      const fs::path file = fs::path(summarize_dir) / "summary.csv";
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << csv;
      if (!out) throw std::runtime_error("failed writing " + file.string());
      std::cout << csv;
    } else if (*plot) {
      const fs::path out = plot_out.empty() ? fs::path(plot_dir) / "plots" : fs::path(plot_out);
      for (const auto& f : plot_directory(plot_dir, out)) std::cout << "wrote " << f.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: " << msg << '\n';
    return 1;
  }
  return 0;
}
