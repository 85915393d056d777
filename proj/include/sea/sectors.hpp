#pragma once

// Superselection sectors of a conserved observable N ([N, H] = 0) and the
// composite-system separability probe.

#include <string>
#include <vector>

#include "sea/dynamics.hpp"

namespace sea {

struct SectorSpec {
  HermitianOperator n_op;
  std::vector<double> eigenvalues;              // one per sector, ascending
  std::vector<HermitianOperator> projectors;    // spectral projectors P_k
  std::vector<Matrix> isometries;               // n x d_k, orthonormal columns spanning range(P_k)
  double degeneracy_tol = 1e-9;
  double commutator_norm = 0.0;                 // ||[N, H]||_F for the H given at decomposition

  int sector_count() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

// Clusters the spectrum of N (gap tolerance gap_tol) and returns the spectral
// projectors. Rejects N, H whose commutator exceeds comm_tol.
SectorSpec sector_decompose(const HermitianOperator& n_op, const HermitianOperator& hamiltonian,
                            double gap_tol = 1e-9, double comm_tol = 1e-10);

// V^+ A V and V A V^+.
HermitianOperator compress(const HermitianOperator& a, const Matrix& isometry);
HermitianOperator embed(const HermitianOperator& a, const Matrix& isometry);

// The scenario restricted to sector k: H, rho0 and custom constraints are
// compressed; rho0 must be supported in the sector.
ScenarioConfig compress_scenario(const ScenarioConfig& scenario, const SectorSpec& spec, int k);

struct SectorReport {
  int sector = 0;
  double nu = 0.0;
  double max_support_leak = 0.0;    // max_t ||rho - P rho P||_F
  double max_left_residual = 0.0;   // max ||N rho_dot - nu rho_dot||_F over samples
  double max_right_residual = 0.0;  // max ||rho_dot N - nu rho_dot||_F over samples
  // Same residual for the unrestricted full-space right-hand side (clamped
  // log, full-space generator). Diagnostic only.
  double max_full_space_residual = 0.0;
  double tolerance = 1e-9;
  double leak_tolerance = 1e-8;
  std::string termination;

  std::vector<double> times;
  std::vector<double> support_leak;
  std::vector<double> sample_times;
  std::vector<double> left_residual;
  std::vector<double> right_residual;
  std::vector<double> full_space_residual;

  bool passed() const {
    return max_support_leak <= leak_tolerance && max_left_residual <= tolerance && max_right_residual <= tolerance;
  }
  nlohmann::json to_json() const;
};

SectorReport check_sector_preservation(const ScenarioConfig& scenario, const SectorSpec& spec, int k,
                                       int samples = 10);

struct RedundancyReport {
  int sector = 0;
  double max_distance = 0.0;  // sector-restricted, {I,H} vs {I,H,N}
  int rank_without = 0;
  int rank_with = 0;
  double tolerance = 1e-8;
  // Full-space comparison from a state spread over all sectors; reported only.
  double full_space_distance = 0.0;
  double full_space_mixing = 0.1;

  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> full_space_series;

  bool passed() const { return max_distance <= tolerance; }
  nlohmann::json to_json() const;
};

RedundancyReport constraint_redundancy_probe(const ScenarioConfig& scenario, const SectorSpec& spec, int k);

enum class SeparabilityMode { kTotalEnergy, kPerSubsystemEnergy };
std::string to_string(SeparabilityMode mode);
SeparabilityMode separability_mode_from_string(const std::string& s);

struct SeparabilityReport {
  SeparabilityMode mode = SeparabilityMode::kTotalEnergy;
  int dim_a = 0;
  int dim_b = 0;
  std::vector<double> times;
  std::vector<double> product_deviation;   // ||rho_AB - rho_A (x) rho_B||_1, local evolutions on the right
  std::vector<double> energy_a;            // Tr((H_A (x) I) rho_AB)
  std::vector<double> energy_b;            // Tr((I (x) H_B) rho_AB)
  std::vector<double> local_energy_a;      // Tr(H_A rho_A), local evolution
  std::vector<double> mutual_information;

  double max_product_deviation() const;
  double max_energy_a_drift() const;
  double max_mutual_information() const;
  double min_mutual_information() const;
  nlohmann::json to_json() const;
};

// Composite H_AB = H_A (x) I + I (x) H_B, rho0 = rho_A (x) rho_B; compares
// the composite evolution with the two local ones on a shared time grid.
SeparabilityReport separability_probe(const ScenarioConfig& a, const ScenarioConfig& b, SeparabilityMode mode,
                                      double t_final, int outputs = 100);

// S(rho_A) + S(rho_B) - S(rho_AB)
double mutual_information(const HermitianOperator& rho_ab, int dim_a, int dim_b);

}  // namespace sea
