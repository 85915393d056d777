#pragma once

// Heisenberg transforms of a self-adjoint basis and the coefficient matrix
// L^H_ab = Tr(chi^H_a L(chi^H_b)).

#include <string>

#include "sea/operator_space.hpp"
#include "sea/sea_generator.hpp"

namespace sea {

// exp[(i/hbar) H t] chi exp[-(i/hbar) H t]
HermitianOperator heisenberg_transform(const HermitianOperator& chi, const HermitianOperator& hamiltonian, double t,
                                       double hbar = 1.0);

struct OnsagerMatrix {
  double t = 0.0;
  std::string basis_id;
  RealMatrix entries;
  double max_imag_residue = 0.0;  // largest |Im Tr(...)| seen before it was discarded
};

// Symmetry beyond 1e-8 is escalated as a verification_failure; smaller
// defects are left for check_reciprocity to report.
OnsagerMatrix onsager_matrix(const DissipativeGenerator& generator, const SelfAdjointBasis& basis,
                             const HermitianOperator& hamiltonian, double t, double hbar = 1.0);

struct ReciprocityReport {
  double max_asymmetry = 0.0;
  double max_imag_residue = 0.0;
  double min_eigenvalue = 0.0;
  double tolerance = 1e-10;
  bool symmetric_ok = false;
  bool real_ok = false;
  bool psd_ok = false;

  bool passed() const { return symmetric_ok && real_ok && psd_ok; }
  nlohmann::json to_json() const;
};

// Reality is judged against 1e-12; symmetry and PSD against tol.
ReciprocityReport check_reciprocity(const OnsagerMatrix& m, double tol = 1e-10);

}  // namespace sea
