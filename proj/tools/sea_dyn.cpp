// sea-dyn: command-line front end for the steepest-entropy-ascent dynamics
// library.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sea/runner.hpp"

namespace {

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) times.push_back(std::stod(item));
  }
  return times;
}

}  // namespace

int main(int argc, char** argv) {
  sea::configure_logging();

  CLI::App app{"Nonlinear steepest-entropy-ascent quantum dynamics"};
  app.require_subcommand(1);

  sea::RunOptions options;
  std::string scenario;
  std::string out;
  double t_final = 0.0;
  double tau = 0.0;
  std::string format = "csv";
  std::string times;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario, "Scenario file (.json or .toml)")->required();
    sub->add_option("--out", out, "Fresh output directory")->required();
    sub->add_option("--t-final", t_final, "Override t_final");
    sub->add_option("--tau", tau, "Override the relaxation time");
    sub->add_option("--seed", options.seed, "Seed for randomized property checks");
    sub->add_option("--format", format, "Trajectory output: csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  };

  for (const char* name : {"evolve", "verify-generator", "onsager", "sector-check", "separability-probe"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    if (std::string(name) == "onsager") sub->add_option("--times", times, "Comma-separated evaluation times");
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  try {
    options.command = sea::command_from_string(sub->get_name());
    options.scenario = scenario;
    options.out_dir = out;
    if (sub->count("--t-final")) options.t_final = t_final;
    if (sub->count("--tau")) options.tau = tau;
    options.format = format == "jsonl" ? sea::OutputFormat::kJsonl : sea::OutputFormat::kCsv;
    if (!times.empty()) options.times = parse_times(times);

    const sea::RunManifest manifest = sea::run(options);
    std::cout << manifest.to_json().dump(2) << '\n';
    return manifest.exit_status;
  } catch (const sea::Error& e) {
    std::cerr << sea::error_json(e).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"field", ""}, {"detail", e.what()}}.dump() << '\n';
    return 2;
  }
}
