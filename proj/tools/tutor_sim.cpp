// Simulation harness CLI: generate scenarios, run them, repeat with derived seeds.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "sostutor/simulator.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sostutor::Error(sostutor::ErrorCode::io, "cannot write " + path);
  out << text;
}

sostutor::sim::Scenario read_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sostutor::Error(sostutor::ErrorCode::io, "cannot read " + path);
  try {
    return sostutor::sim::parse_scenario(sostutor::json::parse(in));
  } catch (const sostutor::json::exception& e) {
    throw sostutor::Error(sostutor::ErrorCode::validation, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tutor recommendation simulator"};
  app.require_subcommand(1);

  std::size_t count = 43;
  std::uint64_t seed = 1;
  std::string out_path;
  bool explicit_profiles = false;
  auto* generate = app.add_subcommand("generate", "Write a seeded scenario file");
  generate->add_option("--count", count, "Population size")->required();
  generate->add_option("--seed", seed, "RNG seed")->required();
  generate->add_option("--out", out_path, "Scenario file to write")->required();
  generate->add_flag("--explicit", explicit_profiles, "Inline the generated profiles");

  std::string scenario_path;
  std::string summary_path;
  unsigned threads = 1;
  auto* run = app.add_subcommand("run", "Run a scenario and write the evaluation report");
  run->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "Report file (JSON)")->required();
  run->add_option("--summary", summary_path, "Also write the summary table to this file");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::size_t trials = 10;
  auto* evaluate = app.add_subcommand("evaluate", "Repeat a scenario with derived seeds");
  evaluate->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--trials", trials, "Number of trials")->required()->check(CLI::PositiveNumber);
  evaluate->add_option("--out", out_path, "Write mean/stddev JSON here");
  evaluate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    namespace sim = sostutor::sim;
    if (*generate) {
      const auto scenario = sim::make_scenario(count, seed, explicit_profiles);
      write_file(out_path, sim::to_json_value(scenario).dump(2) + "\n");
      std::cout << "wrote " << out_path << " (" << count << " profiles, "
                << scenario.requests.size() << " requests)\n";
    } else if (*run) {
      const auto report = sim::run_scenario(read_scenario(scenario_path), threads);
      write_file(out_path, sim::report_text(report));
      const auto table = sim::summary_table(report.metrics, report.results.size());
      if (!summary_path.empty()) write_file(summary_path, table);
      std::cout << table;
    } else if (*evaluate) {
      const auto summaries = sim::evaluate_trials(read_scenario(scenario_path), trials, threads);
      if (!out_path.empty()) write_file(out_path, sim::to_json_value(summaries, trials).dump(2) + "\n");
      std::cout << "trials: " << trials << "\n" << sim::summary_table(summaries);
    }
  } catch (const sostutor::Error& e) {
    std::cerr << "error (" << sostutor::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
