//   Copyright 2026 The QuSquare Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qusquare/harness.hpp"

namespace {

constexpr int EXIT_RULE = 2;
constexpr int EXIT_RUNTIME = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct RunArgs {
  std::string config, out, plot, plot_kind;
  std::uint64_t seed = 0;
};

int run(const std::string& bench, const RunArgs& a) {
  using namespace qusquare;
  SuiteConfig cfg;
  try {
    json j;
    try {
      j = json::parse(slurp(a.config));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("benchmark")) j["benchmark"] = bench;
    if (j["benchmark"] != bench)
      throw ConfigError("config is for '" + j["benchmark"].dump() + "' but the command is '" + bench + "'");
    j["seed"] = a.seed;
    j["out"] = a.out;
    cfg = parse_config(j.dump());
  } catch (const ConfigError& e) {
    std::cerr << "qusquare: " << e.what() << "\n";
    return EXIT_RULE;
  } catch (const std::exception& e) {
    std::cerr << "qusquare: " << e.what() << "\n";
    return EXIT_RUNTIME;
  }
  try {
    const json rep = run_suite(cfg);
    spill(a.out, rep.dump(2) + "\n");
    if (!a.plot.empty()) spill(a.plot, export_plot_data(rep, a.plot_kind));
  } catch (const ConfigError& e) {
    std::cerr << "qusquare: " << e.what() << "\n";
    return EXIT_RULE;
  } catch (const std::exception& e) {
    std::cerr << "qusquare: " << bench << " run failed: " << e.what() << "\n";
    return EXIT_RUNTIME;
  }
  return 0;
}

int validate(const std::string& path) {
  using namespace qusquare;
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const std::exception& e) {
    std::cerr << "qusquare: " << e.what() << "\n";
    return EXIT_RUNTIME;
  }
  const auto errs = validate_report(j);
  for (auto& e : errs) std::cout << e << "\n";
  if (!errs.empty()) return EXIT_RULE;
  std::cout << "report is valid\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QuSquare benchmark suite on simulated backends"};
  app.require_subcommand(1);
  RunArgs args;
  std::string bench;
  for (const char* name : {"clifford", "ghz", "tfim", "qnn"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " benchmark");
    sub->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "master seed")->required();
    sub->add_option("--out", args.out, "report file")->required();
    sub->add_option("--plot-data", args.plot, "CSV file with plot data");
    sub->add_option("--plot-kind", args.plot_kind, "which table to export (default: the first for the benchmark)");
    sub->callback([&bench, name] { bench = name; });
  }
  std::string report;
  auto* val = app.add_subcommand("validate-report", "check a report for missing fields");
  val->add_option("file", report, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return EXIT_RULE;
  }
  if (val->parsed()) return validate(report);
  return run(bench, args);
}
