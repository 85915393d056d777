#pragma once

// Integration of rho_dot = (i/hbar)[rho, H] - L(log rho) and its
// thermodynamic diagnostics.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sea/operator_space.hpp"
#include "sea/sea_generator.hpp"

namespace sea {

struct ConstraintEntry {
  enum class Kind { kIdentity, kHamiltonian, kCustom };
  Kind kind = Kind::kIdentity;
  HermitianOperator op;  // only for kCustom
  std::string label;

  static ConstraintEntry identity() { return {Kind::kIdentity, {}, "identity"}; }
  static ConstraintEntry hamiltonian() { return {Kind::kHamiltonian, {}, "hamiltonian"}; }
  static ConstraintEntry custom(HermitianOperator op, std::string label) {
    return {Kind::kCustom, std::move(op), std::move(label)};
  }
};

struct GeneratorSpec {
  double tau = 1.0;
  bool dissipation = true;
  std::vector<ConstraintEntry> constraints{ConstraintEntry::identity(), ConstraintEntry::hamiltonian()};
};

struct IntegratorSettings {
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 1e-3;
  double dt_min = 1e-14;
  long max_steps = 50'000'000;
};

struct ScenarioConfig {
  int dim = 1;
  HermitianOperator hamiltonian;
  DensityState rho0;
  GeneratorSpec generator;
  double hbar = 1.0;
  double t_final = 50.0;
  IntegratorSettings integrator;
  double eig_floor = kDefaultEigFloor;
  // Spacing of recorded outputs; 0 selects t_final / 200.
  double output_dt = 0.0;
  // Explicit output times in (0, t_final]; overrides output_dt when non-empty.
  std::vector<double> output_times;
  bool stop_at_equilibrium = true;
  double equilibrium_tol = 1e-9;
  int equilibrium_count = 3;

  void validate() const;
};

// Resolved constraint observables, in scenario order.
std::vector<HermitianOperator> constraint_observables(const ScenarioConfig& scenario);
ConstraintSet make_constraint_set(const ScenarioConfig& scenario);
DissipativeGenerator make_generator(const ScenarioConfig& scenario);

// (i/hbar)(rho H - H rho) - L(log rho).
HermitianOperator rhs(const DensityState& rho, const ScenarioConfig& scenario,
                      const DissipativeGenerator& generator);

// -sum lambda ln lambda over eigenvalues >= eig_floor (nats).
double entropy(const DensityState& rho, double eig_floor = kDefaultEigFloor);

// Tr(log rho . L(log rho)).
double entropy_production(const DensityState& rho, const DissipativeGenerator& generator,
                          double eig_floor = kDefaultEigFloor);

struct TrajectoryPoint {
  double t = 0.0;
  DensityState state;
  double entropy = 0.0;
  double entropy_production = 0.0;
  double energy = 0.0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<double> constraint_expectations;
  int clamp_count = 0;  // cumulative spectral repairs up to t
  double rhs_norm = 0.0;
};

enum class Termination { kFinalTime, kEquilibrium, kStepFailure };
std::string to_string(Termination t);

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Termination termination = Termination::kFinalTime;
  std::string detail;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

Trajectory integrate(const ScenarioConfig& scenario);
Trajectory integrate(const ScenarioConfig& scenario, const DissipativeGenerator& generator);

struct InverseTemperature {
  double beta;
};
struct MeanEnergy {
  double energy;
};

struct GibbsState {
  DensityState state;
  double beta = 0.0;
  int iterations = 0;
};

// exp(-beta H)/Z. For a MeanEnergy target beta is found by bisection on the
// decreasing map beta -> <H>_beta over [-50, 50]/||H||.
GibbsState gibbs_state(const HermitianOperator& hamiltonian, std::variant<InverseTemperature, MeanEnergy> target,
                       double energy_tol = 1e-12);

}  // namespace sea
