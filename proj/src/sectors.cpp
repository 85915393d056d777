#include "sea/sectors.hpp"

#include <algorithm>
#include <cmath>

#include "sea/error.hpp"

namespace sea {
namespace {

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

std::vector<std::size_t> sample_indices(std::size_t count, int samples) {
  std::vector<std::size_t> idx;
  if (count == 0 || samples <= 0) return idx;
  const auto want = std::min<std::size_t>(count, static_cast<std::size_t>(samples));
  for (std::size_t s = 0; s < want; ++s) {
    idx.push_back(want == 1 ? 0 : s * (count - 1) / (want - 1));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

void check_sector_index(const SectorSpec& spec, int k) {
  if (k < 0 || k >= spec.sector_count()) {
    throw Error(errc::kInvalidArgument, "sector.index",
                "sector " + std::to_string(k) + " out of range [0, " + std::to_string(spec.sector_count()) + ")");
  }
}

ScenarioConfig with_grid(ScenarioConfig s) {
  s.stop_at_equilibrium = false;
  return s;
}

}  // namespace

SectorSpec sector_decompose(const HermitianOperator& n_op, const HermitianOperator& hamiltonian, double gap_tol,
                            double comm_tol) {
  if (n_op.dim() != hamiltonian.dim()) {
    throw Error(errc::kDimensionMismatch, "sector.N", "N and H dimensions differ");
  }
  SectorSpec spec;
  spec.n_op = n_op;
  spec.degeneracy_tol = gap_tol;
  spec.commutator_norm = commutator_norm(n_op, hamiltonian);
  if (spec.commutator_norm > comm_tol) {
    throw Error(errc::kNotCommuting, "sector.N",
                "||[N, H]||_F = " + std::to_string(spec.commutator_norm) + " exceeds " + std::to_string(comm_tol));
  }
  const Spectrum s = eigensystem(n_op);
  const int n = n_op.dim();
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i < n && s.values(i) - s.values(i - 1) <= gap_tol) continue;
    const int width = i - start;
    Matrix v = s.vectors.middleCols(start, width);
    spec.eigenvalues.push_back(s.values.segment(start, width).mean());
    spec.projectors.push_back(HermitianOperator::symmetrized(v * v.adjoint()));
    spec.isometries.push_back(std::move(v));
    start = i;
  }
  return spec;
}

HermitianOperator compress(const HermitianOperator& a, const Matrix& isometry) {
  return HermitianOperator::symmetrized(isometry.adjoint() * a.matrix() * isometry);
}

HermitianOperator embed(const HermitianOperator& a, const Matrix& isometry) {
  return HermitianOperator::symmetrized(isometry * a.matrix() * isometry.adjoint());
}

ScenarioConfig compress_scenario(const ScenarioConfig& scenario, const SectorSpec& spec, int k) {
  scenario.validate();
  check_sector_index(spec, k);
  if (spec.n_op.dim() != scenario.dim) throw Error(errc::kDimensionMismatch, "sector.N", "dimension differs from dim");
  const double comm = commutator_norm(spec.n_op, scenario.hamiltonian);
  if (comm > 1e-10) {
    throw Error(errc::kNotCommuting, "sector.N", "||[N, H]||_F = " + std::to_string(comm));
  }
  const auto& p = spec.projectors[static_cast<std::size_t>(k)].matrix();
  const Matrix& rho = scenario.rho0.op().matrix();
  const double leak = (rho - p * rho * p).norm();
  if (leak > 1e-10) {
    throw Error(errc::kUnsupportedState, "rho0",
                "initial state is not supported in sector " + std::to_string(k) + " (||rho - P rho P||_F = " +
                    std::to_string(leak) + ")");
  }
  const Matrix& v = spec.isometries[static_cast<std::size_t>(k)];
  ScenarioConfig out = scenario;
  out.dim = static_cast<int>(v.cols());
  out.hamiltonian = compress(scenario.hamiltonian, v);
  out.rho0 = DensityState::from_operator(compress(scenario.rho0.op(), v), kStateTol, kStateTol, "rho0");
  for (auto& c : out.generator.constraints) {
    if (c.kind == ConstraintEntry::Kind::kCustom) c.op = compress(c.op, v);
  }
  return out;
}

SectorReport check_sector_preservation(const ScenarioConfig& scenario, const SectorSpec& spec, int k, int samples) {
  const ScenarioConfig restricted = compress_scenario(scenario, spec, k);
  const auto ks = static_cast<std::size_t>(k);
  const Matrix& v = spec.isometries[ks];
  const Matrix& p = spec.projectors[ks].matrix();
  const Matrix& n_mat = spec.n_op.matrix();

  SectorReport report;
  report.sector = k;
  report.nu = spec.eigenvalues[ks];
  report.leak_tolerance = std::max(scenario.integrator.rtol, 1e-12);

  const DissipativeGenerator local_gen = make_generator(restricted);
  const Trajectory traj = integrate(restricted, local_gen);
  report.termination = to_string(traj.termination);

  for (const auto& pt : traj.points) {
    const Matrix full = embed(pt.state.op(), v).matrix();
    const double leak = (full - p * full * p).norm();
    report.times.push_back(pt.t);
    report.support_leak.push_back(leak);
    report.max_support_leak = std::max(report.max_support_leak, leak);
  }

  const DissipativeGenerator full_gen = make_generator(scenario);
  for (std::size_t i : sample_indices(traj.points.size(), samples)) {
    const auto& pt = traj.points[i];
    const Matrix r = embed(rhs(pt.state, restricted, local_gen), v).matrix();
    const double left = (n_mat * r - report.nu * r).norm();
    const double right = (r * n_mat - report.nu * r).norm();

    const DensityState full_state = DensityState::assume_valid(embed(pt.state.op(), v));
    const Matrix rf = rhs(full_state, scenario, full_gen).matrix();
    const double full_residual = std::max((n_mat * rf - report.nu * rf).norm(), (rf * n_mat - report.nu * rf).norm());

    report.sample_times.push_back(pt.t);
    report.left_residual.push_back(left);
    report.right_residual.push_back(right);
    report.full_space_residual.push_back(full_residual);
    report.max_left_residual = std::max(report.max_left_residual, left);
    report.max_right_residual = std::max(report.max_right_residual, right);
    report.max_full_space_residual = std::max(report.max_full_space_residual, full_residual);
  }
  return report;
}

RedundancyReport constraint_redundancy_probe(const ScenarioConfig& scenario, const SectorSpec& spec, int k) {
  const ScenarioConfig restricted = with_grid(compress_scenario(scenario, spec, k));
  const Matrix& v = spec.isometries[static_cast<std::size_t>(k)];

  ScenarioConfig without = restricted;
  without.generator.constraints = {ConstraintEntry::identity(), ConstraintEntry::hamiltonian()};
  ScenarioConfig with = without;
  with.generator.constraints.push_back(ConstraintEntry::custom(compress(spec.n_op, v), "N"));

  RedundancyReport report;
  report.sector = k;
  const DissipativeGenerator gen_without = make_generator(without);
  const DissipativeGenerator gen_with = make_generator(with);
  report.rank_without = gen_without.constraints().rank();
  report.rank_with = gen_with.constraints().rank();
  const Trajectory a = integrate(without, gen_without);
  const Trajectory b = integrate(with, gen_with);
  const std::size_t count = std::min(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < count; ++i) {
    const double d = trace_distance(a.points[i].state.op(), b.points[i].state.op());
    report.times.push_back(a.points[i].t);
    report.distance.push_back(d);
    report.max_distance = std::max(report.max_distance, d);
  }
  if (a.points.size() != b.points.size()) report.max_distance = std::numeric_limits<double>::infinity();

  // Full space, starting from a state with weight in every sector.
  ScenarioConfig full = with_grid(scenario);
  const double w = report.full_space_mixing;
  full.rho0 = DensityState::assume_valid((1.0 - w) * scenario.rho0.op() +
                                         (w / scenario.dim) * HermitianOperator::identity(scenario.dim));
  full.generator.constraints = {ConstraintEntry::identity(), ConstraintEntry::hamiltonian()};
  ScenarioConfig full_with = full;
  full_with.generator.constraints.push_back(ConstraintEntry::custom(spec.n_op, "N"));
  const Trajectory fa = integrate(full);
  const Trajectory fb = integrate(full_with);
  const std::size_t fcount = std::min(fa.points.size(), fb.points.size());
  for (std::size_t i = 0; i < fcount; ++i) {
    const double d = trace_distance(fa.points[i].state.op(), fb.points[i].state.op());
    report.full_space_series.push_back(d);
    report.full_space_distance = std::max(report.full_space_distance, d);
  }
  return report;
}

std::string to_string(SeparabilityMode mode) {
  return mode == SeparabilityMode::kTotalEnergy ? "total-energy" : "per-subsystem-energy";
}

SeparabilityMode separability_mode_from_string(const std::string& s) {
  if (s == "total-energy") return SeparabilityMode::kTotalEnergy;
  if (s == "per-subsystem-energy") return SeparabilityMode::kPerSubsystemEnergy;
  throw Error(errc::kInvalidArgument, "separability.mode",
              "expected \"total-energy\" or \"per-subsystem-energy\", got \"" + s + "\"");
}

double mutual_information(const HermitianOperator& rho_ab, int dim_a, int dim_b) {
  const auto s = [](const HermitianOperator& r) { return entropy(DensityState::assume_valid(r)); };
  return s(partial_trace_b(rho_ab, dim_a, dim_b)) + s(partial_trace_a(rho_ab, dim_a, dim_b)) - s(rho_ab);
}

SeparabilityReport separability_probe(const ScenarioConfig& a, const ScenarioConfig& b, SeparabilityMode mode,
                                      double t_final, int outputs) {
  a.validate();
  b.validate();
  if (a.hbar != b.hbar) throw Error(errc::kInvalidArgument, "separability.B.hbar", "subsystems must share hbar");
  if (a.generator.dissipation != b.generator.dissipation ||
      (a.generator.dissipation && a.generator.tau != b.generator.tau)) {
    throw Error(errc::kInvalidArgument, "separability.B.generator.tau", "subsystems must share tau");
  }
  if (!(a.rho0.min_eigenvalue() > a.eig_floor)) {
    throw Error(errc::kUnsupportedState, "separability.A.rho0", "subsystem state must be full rank");
  }
  if (!(b.rho0.min_eigenvalue() > b.eig_floor)) {
    throw Error(errc::kUnsupportedState, "separability.B.rho0", "subsystem state must be full rank");
  }
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw Error(errc::kInvalidArgument, "separability.t_final", "must be non-negative");
  }
  if (outputs < 1) throw Error(errc::kInvalidArgument, "separability.outputs", "must be >= 1");

  const int na = a.dim;
  const int nb = b.dim;
  const HermitianOperator ia = HermitianOperator::identity(na);
  const HermitianOperator ib = HermitianOperator::identity(nb);
  const HermitianOperator ha_full = kron(a.hamiltonian, ib);
  const HermitianOperator hb_full = kron(ia, b.hamiltonian);

  ScenarioConfig ab = a;
  ab.dim = na * nb;
  ab.hamiltonian = ha_full + hb_full;
  ab.rho0 = DensityState::assume_valid(kron(a.rho0.op(), b.rho0.op()));
  ab.generator.constraints = {ConstraintEntry::identity()};
  if (mode == SeparabilityMode::kTotalEnergy) {
    ab.generator.constraints.push_back(ConstraintEntry::hamiltonian());
  } else {
    ab.generator.constraints.push_back(ConstraintEntry::custom(ha_full, "H_A"));
    ab.generator.constraints.push_back(ConstraintEntry::custom(hb_full, "H_B"));
  }

  SeparabilityReport report;
  report.mode = mode;
  report.dim_a = na;
  report.dim_b = nb;

  const auto record = [&](double t, const HermitianOperator& rho_ab, const HermitianOperator& rho_a,
                          const HermitianOperator& rho_b) {
    report.times.push_back(t);
    report.product_deviation.push_back(trace_norm(rho_ab - kron(rho_a, rho_b)));
    report.energy_a.push_back(hs_inner(ha_full, rho_ab));
    report.energy_b.push_back(hs_inner(hb_full, rho_ab));
    report.local_energy_a.push_back(hs_inner(a.hamiltonian, rho_a));
    report.mutual_information.push_back(mutual_information(rho_ab, na, nb));
  };

  if (t_final == 0.0) {
    record(0.0, ab.rho0.op(), a.rho0.op(), b.rho0.op());
    return report;
  }

  std::vector<double> grid;
  for (int i = 1; i <= outputs; ++i) grid.push_back(t_final * i / outputs);
  const auto prepare = [&](ScenarioConfig s) {
    s.t_final = t_final;
    s.output_times = grid;
    s.stop_at_equilibrium = false;
    return s;
  };
  const Trajectory tab = integrate(prepare(ab));
  const Trajectory ta = integrate(prepare(a));
  const Trajectory tb = integrate(prepare(b));
  const std::size_t count = std::min({tab.points.size(), ta.points.size(), tb.points.size()});
  for (std::size_t i = 0; i < count; ++i) {
    record(tab.points[i].t, tab.points[i].state.op(), ta.points[i].state.op(), tb.points[i].state.op());
  }
  return report;
}

double SeparabilityReport::max_product_deviation() const {
  return product_deviation.empty() ? 0.0 : *std::max_element(product_deviation.begin(), product_deviation.end());
}

double SeparabilityReport::max_energy_a_drift() const {
  double drift = 0.0;
  for (double e : energy_a) drift = std::max(drift, std::abs(e - energy_a.front()));
  return drift;
}

double SeparabilityReport::max_mutual_information() const {
  return mutual_information.empty() ? 0.0 : *std::max_element(mutual_information.begin(), mutual_information.end());
}

double SeparabilityReport::min_mutual_information() const {
  return mutual_information.empty() ? 0.0 : *std::min_element(mutual_information.begin(), mutual_information.end());
}

nlohmann::json SectorReport::to_json() const {
  return {{"sector", sector},
          {"nu", nu},
          {"max_support_leak", max_support_leak},
          {"max_left_residual", max_left_residual},
          {"max_right_residual", max_right_residual},
          {"max_full_space_residual", max_full_space_residual},
          {"tolerance", tolerance},
          {"leak_tolerance", leak_tolerance},
          {"termination", termination},
          {"samples", sample_times.size()},
          {"passed", passed()}};
}

nlohmann::json RedundancyReport::to_json() const {
  return {{"sector", sector},
          {"max_distance", max_distance},
          {"rank_without", rank_without},
          {"rank_with", rank_with},
          {"tolerance", tolerance},
          {"full_space_distance", full_space_distance},
          {"full_space_mixing", full_space_mixing},
          {"passed", passed()}};
}

nlohmann::json SeparabilityReport::to_json() const {
  return {{"mode", to_string(mode)},
          {"dim_a", dim_a},
          {"dim_b", dim_b},
          {"outputs", times.size()},
          {"max_product_deviation", max_product_deviation()},
          {"max_energy_a_drift", max_energy_a_drift()},
          {"max_mutual_information", max_mutual_information()},
          {"min_mutual_information", min_mutual_information()}};
}

}  // namespace sea
