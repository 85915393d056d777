#pragma once

// The dissipative superoperator L of rho_dot = -L(log rho) + (i/hbar)[rho, H],
// realized as the Hilbert-Schmidt orthogonal projector onto the complement of
// the conserved observables, scaled by 1/tau.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sea/operator_space.hpp"

namespace sea {

inline constexpr double kRankTol = 1e-10;
inline constexpr double kGeneratorTol = 1e-10;

// Conserved observables. raw()[0] is always the identity; ortho() is an
// orthonormal basis of span(raw()) under hs_inner.
class ConstraintSet {
 public:
  int dim() const noexcept { return dim_; }
  const std::vector<HermitianOperator>& raw() const noexcept { return raw_; }
  const std::vector<HermitianOperator>& ortho() const noexcept { return ortho_; }
  int rank() const noexcept { return static_cast<int>(ortho_.size()); }

  // n^2 x rank matrix whose columns are the canonical coordinates of ortho().
  const RealMatrix& ortho_coordinates() const noexcept { return q_; }

  // Orthogonal projection onto span(raw()).
  HermitianOperator project(const HermitianOperator& a) const;

  friend ConstraintSet build_constraint_set(int dim, std::vector<HermitianOperator> observables,
                                            double rank_tol);

 private:
  int dim_ = 0;
  std::vector<HermitianOperator> raw_;
  std::vector<HermitianOperator> ortho_;
  RealMatrix q_;
};

// Modified Gram-Schmidt with one re-orthogonalization pass; residuals with
// norm < rank_tol are dropped. The identity is inserted at position 0 unless
// observables[0] already is the identity.
ConstraintSet build_constraint_set(int dim, std::vector<HermitianOperator> observables,
                                   double rank_tol = kRankTol);

// rho_dot|diss = -L(log rho), L Hermitian PSD. With this sign the entropy
// production Tr(log rho . L(log rho)) is non-negative.
enum class SignConvention { kMinusLogRho };

using GeneratorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class DissipativeGenerator {
 public:
  // Wraps an arbitrary representation without verification.
  static DissipativeGenerator from_matrix(ConstraintSet constraints, double tau, GeneratorMatrix rep);

  int dim() const noexcept { return constraints_.dim(); }
  double tau() const noexcept { return tau_; }
  bool dissipative() const noexcept { return std::isfinite(tau_); }
  const ConstraintSet& constraints() const noexcept { return constraints_; }
  const GeneratorMatrix& matrix_rep() const noexcept { return rep_; }
  SignConvention sign_convention() const noexcept { return SignConvention::kMinusLogRho; }

  // out = L x in canonical coordinates.
  void apply_coordinates(std::span<const double> x, std::span<double> out) const;
  HermitianOperator apply(const HermitianOperator& a) const;

 private:
  DissipativeGenerator(ConstraintSet constraints, double tau, GeneratorMatrix rep)
      : constraints_(std::move(constraints)), tau_(tau), rep_(std::move(rep)) {}
  ConstraintSet constraints_;
  double tau_ = 1.0;
  GeneratorMatrix rep_;
};

// L = (1/tau) (identity - projector onto span(constraints)). Verified before
// return; throws verification_failure if any check fails.
DissipativeGenerator build_projector_generator(const ConstraintSet& constraints, double tau);

// L = 0, tau = +inf: the purely Hamiltonian limit.
DissipativeGenerator build_disabled_generator(const ConstraintSet& constraints);

HermitianOperator apply_generator(const DissipativeGenerator& generator, const HermitianOperator& a);

struct VerificationReport {
  double hermiticity_violation = 0.0;  // max |M_ij - M_ji|
  double min_eigenvalue = 0.0;         // of the symmetric part of M
  double max_constraint_residual = 0.0;  // max_C ||L(C)||_F
  double spectrum_deviation = 0.0;     // max distance of an eigenvalue from {0, 1/tau}
  double tolerance = kGeneratorTol;
  bool hermitian_ok = false;
  bool psd_ok = false;
  bool kernel_ok = false;
  bool projector_spectrum_ok = false;  // informative; required only of projector generators

  bool passed() const { return hermitian_ok && psd_ok && kernel_ok; }
  nlohmann::json to_json() const;
};

VerificationReport verify_generator(const DissipativeGenerator& generator, double tol = kGeneratorTol,
                                    double spectrum_tol = 1e-9);

}  // namespace sea
