#include "sea/runner.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "sea/dynamics.hpp"
#include "sea/kernels.hpp"
#include "sea/onsager.hpp"
#include "sea/scenario.hpp"
#include "sea/sectors.hpp"

namespace sea {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kHardTraceDrift = 1e-6;
constexpr double kHardEntropyDecrease = 1e-6;
constexpr double kHardPsd = -1e-10;

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error(errc::kIo, "out", "cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::kIo, "out", "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw Error(errc::kInvalidArgument, "out", "output directory is required");
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(errc::kIo, "out", dir.string() + " is not a directory");
    if (!fs::is_empty(dir)) {
      throw Error(errc::kIo, "out", dir.string() + " already holds outputs; choose a fresh directory");
    }
  }
  fs::create_directories(dir);
}

HermitianOperator random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = Complex(normal(rng), normal(rng));
  }
  return HermitianOperator::symmetrized(m);
}

std::string basis_label(int n, int index) {
  if (index < n) return "d" + std::to_string(index);
  int k = n;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (k == index) return "p" + std::to_string(a) + "_" + std::to_string(b);
      if (k + 1 == index) return "m" + std::to_string(a) + "_" + std::to_string(b);
      k += 2;
    }
  }
  return "e" + std::to_string(index);
}

void run_evolve(const ScenarioConfig& config, const RunOptions& options, RunManifest& manifest) {
  const DissipativeGenerator generator = make_generator(config);
  const Trajectory traj = integrate(config, generator);
  manifest.termination = to_string(traj.termination);

  std::vector<std::string> header{"t", "S", "sigma", "energy", "trace", "min_eig", "clamp_count"};
  for (std::size_t i = 0; i < generator.constraints().raw().size(); ++i) header.push_back("C" + std::to_string(i));
  CsvWriter csv(options.out_dir / "trajectory.csv", header);

  double max_trace_drift = 0.0;
  double max_entropy_decrease = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  double max_energy_drift = 0.0;
  const double e0 = traj.points.front().energy;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& p = traj.points[i];
    std::vector<double> row{p.t, p.entropy, p.entropy_production, p.energy, p.trace, p.min_eigenvalue,
                            static_cast<double>(p.clamp_count)};
    row.insert(row.end(), p.constraint_expectations.begin(), p.constraint_expectations.end());
    csv.row(row);
    max_trace_drift = std::max(max_trace_drift, std::abs(p.trace - 1.0));
    max_energy_drift = std::max(max_energy_drift, std::abs(p.energy - e0));
    min_eig = std::min(min_eig, p.min_eigenvalue);
    if (i > 0) max_entropy_decrease = std::max(max_entropy_decrease, traj.points[i - 1].entropy - p.entropy);
  }
  manifest.artifacts.push_back("trajectory.csv");

  if (options.format == OutputFormat::kJsonl) {
    std::ofstream out(options.out_dir / "states.jsonl", std::ios::binary);
    for (const auto& p : traj.points) out << json{{"t", p.t}, {"rho", to_json(p.state.op())}}.dump() << '\n';
    manifest.artifacts.push_back("states.jsonl");
  }

  const bool ok = traj.termination != Termination::kStepFailure && max_trace_drift <= kHardTraceDrift &&
                  max_entropy_decrease <= kHardEntropyDecrease && min_eig >= kHardPsd;
  manifest.verification = {{"points", traj.points.size()},
                           {"accepted_steps", traj.accepted_steps},
                           {"rejected_steps", traj.rejected_steps},
                           {"max_trace_drift", max_trace_drift},
                           {"max_entropy_decrease", max_entropy_decrease},
                           {"max_energy_drift", max_energy_drift},
                           {"min_eigenvalue", min_eig},
                           {"clamp_count", traj.points.back().clamp_count},
                           {"final_entropy", traj.points.back().entropy},
                           {"detail", traj.detail},
                           {"passed", ok}};
  manifest.exit_status = ok ? 0 : 1;
}

void run_verify_generator(const ScenarioConfig& config, const RunOptions& options, RunManifest& manifest) {
  const DissipativeGenerator generator = make_generator(config);
  const VerificationReport report = verify_generator(generator);

  // Randomized projector properties.
  std::mt19937_64 rng(options.seed);
  double idempotence = 0.0;
  double split = 0.0;
  double kernel = 0.0;
  const int trials = 20;
  for (int i = 0; i < trials && generator.dissipative(); ++i) {
    const HermitianOperator a = random_hermitian(config.dim, rng);
    const HermitianOperator la = generator.apply(a);
    idempotence = std::max(idempotence, (generator.apply(generator.tau() * la) - la).frobenius_norm());
    split = std::max(split, (a - generator.tau() * la - generator.constraints().project(a)).frobenius_norm());
    for (const auto& c : generator.constraints().raw()) kernel = std::max(kernel, std::abs(hs_inner(c, la)));
  }
  const bool props_ok = idempotence <= 1e-9 && split <= 1e-9 && kernel <= 1e-10;
  const bool ok = report.passed() && (!generator.dissipative() || report.projector_spectrum_ok) && props_ok;

  json out = report.to_json();
  out["tau"] = generator.dissipative() ? json(generator.tau()) : json("inf");
  out["constraint_rank"] = generator.constraints().rank();
  out["sign_convention"] = "rho_dot_diss = -L(log rho)";
  out["random_properties"] = {{"seed", options.seed},     {"trials", trials},
                              {"idempotence", idempotence}, {"orthogonal_split", split},
                              {"kernel_exactness", kernel}, {"passed", props_ok}};
  out["passed"] = ok;
  write_json(options.out_dir / "generator_report.json", out);
  manifest.artifacts.push_back("generator_report.json");
  manifest.verification = out;
  manifest.termination = "completed";
  manifest.exit_status = ok ? 0 : 1;
}

void run_onsager(const ScenarioFile& file, const RunOptions& options, RunManifest& manifest) {
  const ScenarioConfig& config = file.require_config();
  std::vector<double> times = options.times;
  if (times.empty() && file.onsager) times = file.onsager->times;
  if (times.empty()) times = {0.0};

  const DissipativeGenerator generator = make_generator(config);
  const SelfAdjointBasis basis = build_selfadjoint_basis(config.dim);
  std::vector<std::string> header;
  for (std::size_t i = 0; i < basis.size(); ++i) header.push_back(basis_label(config.dim, static_cast<int>(i)));

  json reports = json::array();
  bool ok = true;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const OnsagerMatrix m = onsager_matrix(generator, basis, config.hamiltonian, times[k], config.hbar);
    const ReciprocityReport r = check_reciprocity(m);
    const std::string name = "onsager_t" + std::to_string(k) + ".csv";
    CsvWriter csv(options.out_dir / name, header);
    for (Eigen::Index row = 0; row < m.entries.rows(); ++row) {
      csv.row(std::vector<double>(m.entries.row(row).begin(), m.entries.row(row).end()));
    }
    manifest.artifacts.push_back(name);
    json entry = r.to_json();
    entry["t"] = times[k];
    entry["file"] = name;
    entry["trace"] = m.entries.trace();
    reports.push_back(std::move(entry));
    ok = ok && r.passed();
  }
  const json out = {{"basis", basis.id()}, {"times", times}, {"reports", reports}, {"passed", ok}};
  write_json(options.out_dir / "reciprocity.json", out);
  manifest.artifacts.push_back("reciprocity.json");
  manifest.verification = out;
  manifest.termination = "completed";
  manifest.exit_status = ok ? 0 : 1;
}

void run_sector_check(const ScenarioFile& file, const RunOptions& options, RunManifest& manifest) {
  const ScenarioConfig& config = file.require_config();
  if (!file.sector) throw Error(errc::kParse, "sector", "sector-check needs a \"sector\" section");
  const SectorSpec spec = sector_decompose(file.sector->n_op, config.hamiltonian);
  const SectorReport pres = check_sector_preservation(config, spec, file.sector->index, file.sector->samples);
  const RedundancyReport red = constraint_redundancy_probe(config, spec, file.sector->index);

  {
    CsvWriter csv(options.out_dir / "sector_support.csv", {"t", "support_leak"});
    for (std::size_t i = 0; i < pres.times.size(); ++i) csv.row({pres.times[i], pres.support_leak[i]});
  }
  {
    CsvWriter csv(options.out_dir / "sector_residuals.csv", {"t", "left_residual", "right_residual", "full_space_residual"});
    for (std::size_t i = 0; i < pres.sample_times.size(); ++i) {
      csv.row({pres.sample_times[i], pres.left_residual[i], pres.right_residual[i], pres.full_space_residual[i]});
    }
  }
  {
    CsvWriter csv(options.out_dir / "redundancy.csv", {"t", "distance", "full_space_distance"});
    for (std::size_t i = 0; i < red.times.size(); ++i) {
      const double full = i < red.full_space_series.size() ? red.full_space_series[i] : std::nan("");
      csv.row({red.times[i], red.distance[i], full});
    }
  }
  json sectors = json::array();
  for (int k = 0; k < spec.sector_count(); ++k) {
    sectors.push_back({{"nu", spec.eigenvalues[static_cast<std::size_t>(k)]},
                       {"dim", spec.isometries[static_cast<std::size_t>(k)].cols()}});
  }
  const bool ok = pres.passed() && red.passed();
  const json out = {{"sectors", sectors},
                    {"commutator_norm", spec.commutator_norm},
                    {"preservation", pres.to_json()},
                    {"redundancy", red.to_json()},
                    {"passed", ok}};
  write_json(options.out_dir / "sector_report.json", out);
  manifest.artifacts.insert(manifest.artifacts.end(),
                            {"sector_support.csv", "sector_residuals.csv", "redundancy.csv", "sector_report.json"});
  manifest.verification = out;
  manifest.termination = pres.termination;
  manifest.exit_status = ok ? 0 : 1;
}

void run_separability(const ScenarioFile& file, const RunOptions& options, RunManifest& manifest) {
  if (!file.separability) throw Error(errc::kParse, "separability", "separability-probe needs a \"separability\" section");
  const SeparabilitySection& s = *file.separability;
  const double t_final = options.t_final.value_or(s.t_final);
  const SeparabilityReport report = separability_probe(s.a, s.b, s.mode, t_final, s.outputs);
  CsvWriter csv(options.out_dir / "separability.csv",
                {"t", "product_deviation", "energy_A", "energy_B", "local_energy_A", "mutual_information"});
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    csv.row({report.times[i], report.product_deviation[i], report.energy_a[i], report.energy_b[i],
             report.local_energy_a[i], report.mutual_information[i]});
  }
  json out = report.to_json();
  const bool ok = report.min_mutual_information() >= -1e-9;
  out["mutual_information_nonnegative"] = ok;
  write_json(options.out_dir / "separability.json", out);
  manifest.artifacts.insert(manifest.artifacts.end(), {"separability.csv", "separability.json"});
  manifest.verification = out;
  manifest.termination = "completed";
  manifest.exit_status = ok ? 0 : 1;
}

json apply_overrides(json doc, const RunOptions& options) {
  const auto patch = [&](json& block) {
    if (!block.is_object()) return;
    if (options.t_final) block["t_final"] = *options.t_final;
    if (options.tau) block["generator"]["tau"] = *options.tau;
  };
  if (doc.contains("hamiltonian")) patch(doc);
  if (doc.contains("separability") && doc["separability"].is_object()) {
    auto& sep = doc["separability"];
    if (options.t_final) sep["t_final"] = *options.t_final;
    if (options.tau) {
      for (const char* side : {"A", "B"}) {
        if (sep.contains(side)) sep[side]["generator"]["tau"] = *options.tau;
      }
    }
  }
  return doc;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::kEvolve:
      return "evolve";
    case Command::kVerifyGenerator:
      return "verify-generator";
    case Command::kOnsager:
      return "onsager";
    case Command::kSectorCheck:
      return "sector-check";
    case Command::kSeparabilityProbe:
      return "separability-probe";
  }
  return "unknown";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::kEvolve, Command::kVerifyGenerator, Command::kOnsager, Command::kSectorCheck,
                    Command::kSeparabilityProbe}) {
    if (to_string(c) == s) return c;
  }
  throw Error(errc::kInvalidArgument, "command", "unknown command \"" + s + "\"");
}

RunManifest run(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioFile file =
      parse_scenario(apply_overrides(read_scenario_document(options.scenario), options), options.scenario.string());
  prepare_out_dir(options.out_dir);

  RunManifest manifest;
  manifest.scenario_path = options.scenario.string();
  manifest.digest = file.digest;
  manifest.command = to_string(options.command);
  manifest.out_dir = options.out_dir.string();
  manifest.kernels = std::string(kernels::active().name);
  spdlog::info("{} on {} (digest {}, kernels {})", manifest.command, manifest.scenario_path, manifest.digest,
               manifest.kernels);

  try {
    switch (options.command) {
      case Command::kEvolve:
        run_evolve(file.require_config(), options, manifest);
        break;
      case Command::kVerifyGenerator:
        run_verify_generator(file.require_config(), options, manifest);
        break;
      case Command::kOnsager:
        run_onsager(file, options, manifest);
        break;
      case Command::kSectorCheck:
        run_sector_check(file, options, manifest);
        break;
      case Command::kSeparabilityProbe:
        run_separability(file, options, manifest);
        break;
    }
  } catch (const Error& e) {
    write_json(options.out_dir / "error.json", error_json(e));
    throw;
  }

  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(options.out_dir / "manifest.json", manifest.to_json());
  return manifest;
}

json RunManifest::to_json() const {
  return {{"scenario", scenario_path}, {"digest", digest},
          {"command", command},        {"out_dir", out_dir},
          {"kernels", kernels},        {"wall_seconds", wall_seconds},
          {"termination", termination}, {"verification", verification},
          {"artifacts", artifacts},    {"exit_status", exit_status}};
}

json error_json(const Error& e) { return {{"error", e.code()}, {"field", e.field()}, {"detail", e.detail()}}; }

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

void configure_logging() {
  const char* env = std::getenv("SEA_DYN_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace sea
