#pragma once

// Hermitian operators on a finite-dimensional Hilbert space, the
// Hilbert-Schmidt geometry of operator space, spectral matrix functions, and
// the canonical self-adjoint basis {|aa), |ab+), |ab-)}.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace sea {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kStateTol = 1e-10;
inline constexpr double kDefaultEigFloor = 1e-12;

// n x n complex Hermitian matrix. Construction validates hermiticity per entry
// and then stores the exactly Hermitian part (A + A^+)/2.
class HermitianOperator {
 public:
  HermitianOperator();

  static HermitianOperator from_matrix(const Matrix& m, double tol = kHermiticityTol,
                                       const std::string& field = "operator");
  // For results that are Hermitian by construction up to roundoff.
  static HermitianOperator symmetrized(const Matrix& m);

  static HermitianOperator identity(int n);
  static HermitianOperator zero(int n);
  static HermitianOperator diagonal(std::span<const double> values);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace().real(); }

  HermitianOperator& operator+=(const HermitianOperator& other);
  HermitianOperator& operator-=(const HermitianOperator& other);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }

 private:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

// Ascending eigenvalues and the matching orthonormal eigenvector columns.
struct Spectrum {
  RealVector values;
  Matrix vectors;

  Matrix reconstruct() const;
};

Spectrum eigensystem(const HermitianOperator& a);

// Positive semidefinite, unit-trace operator with its spectrum cached.
class DensityState {
 public:
  DensityState();

  // Validates eigenvalues >= -psd_tol and |Tr - 1| <= trace_tol. Errors name
  // `field` (e.g. "rho0.trace", "rho0.psd").
  static DensityState from_operator(const HermitianOperator& op, double psd_tol = kStateTol,
                                    double trace_tol = kStateTol, const std::string& field = "rho");
  // Skips validation; the caller vouches for the invariants (integrator output
  // after spectral repair, products of valid states).
  static DensityState assume_valid(const HermitianOperator& op);

  static DensityState maximally_mixed(int n);

  int dim() const noexcept { return op_.dim(); }
  const HermitianOperator& op() const noexcept { return op_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double min_eigenvalue() const { return spectrum_.values.size() ? spectrum_.values(0) : 0.0; }

 private:
  DensityState(HermitianOperator op, Spectrum spectrum)
      : op_(std::move(op)), spectrum_(std::move(spectrum)) {}
  HermitianOperator op_;
  Spectrum spectrum_;
};

// Tr(a b); rejects dimension mismatch and imaginary residues above 1e-12.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

// Complex Tr(a b) for arbitrary square matrices.
Complex trace_product(const Matrix& a, const Matrix& b);

// Ordered collection of n^2 Hermitian operators spanning operator space, with
// their Gram matrix. The canonical construction is orthonormal.
class SelfAdjointBasis {
 public:
  static SelfAdjointBasis canonical(int n);
  // Any n^2 Hermitian operators with an invertible Gram matrix.
  static SelfAdjointBasis from_elements(std::vector<HermitianOperator> elements, std::string id);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<HermitianOperator>& elements() const noexcept { return elements_; }
  const HermitianOperator& operator[](std::size_t i) const { return elements_[i]; }
  const RealMatrix& gram() const noexcept { return gram_; }
  double condition_number() const noexcept { return condition_; }
  const std::string& id() const noexcept { return id_; }

 private:
  SelfAdjointBasis(int dim, std::vector<HermitianOperator> elements, std::string id);
  int dim_ = 0;
  std::vector<HermitianOperator> elements_;
  RealMatrix gram_;
  double condition_ = 1.0;
  std::string id_;
};

SelfAdjointBasis build_selfadjoint_basis(int n);

// Coordinates in the canonical basis: x_i = Tr(e_i A). The map is an isometry
// between Hermitian operators under hs_inner and R^{n^2} under the dot product.
RealVector to_coordinates(const HermitianOperator& a);
void to_coordinates(const Matrix& a, std::span<double> out);
HermitianOperator from_coordinates(std::span<const double> x, int n);
void from_coordinates(std::span<const double> x, Matrix& out);

struct LogResult {
  HermitianOperator log;
  int clamped = 0;
};

// Spectral logarithm with eigenvalues below eig_floor raised to eig_floor.
LogResult matrix_log(const DensityState& rho, double eig_floor = kDefaultEigFloor);
// Same, for an operator already diagonalized (no PSD validation).
LogResult matrix_log(const Spectrum& spectrum, double eig_floor = kDefaultEigFloor);

HermitianOperator matrix_exp_hermitian(const HermitianOperator& a);

// Composite-system helpers (A is the left factor).
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator partial_trace_b(const HermitianOperator& ab, int dim_a, int dim_b);
HermitianOperator partial_trace_a(const HermitianOperator& ab, int dim_a, int dim_b);

// Sum of absolute eigenvalues.
double trace_norm(const HermitianOperator& a);
// (1/2) ||a - b||_1
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);

// {"dim": n, "re": [[...]], "im": [[...]]}; "im" may be omitted for real
// operators. Deserialization re-validates hermiticity.
nlohmann::json to_json(const HermitianOperator& a);
HermitianOperator operator_from_json(const nlohmann::json& j, const std::string& field = "operator");

}  // namespace sea
