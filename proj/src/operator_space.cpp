#include "sea/operator_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sea/error.hpp"
#include "sea/kernels.hpp"

namespace sea {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void require_square(const Matrix& m, const std::string& field) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(errc::kDimensionMismatch, field,
                "expected a non-empty square matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

int dim_from_coordinates(std::size_t count) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (n < 1 || static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != count) {
    throw Error(errc::kDimensionMismatch, "coordinates",
                "coordinate count " + std::to_string(count) + " is not a perfect square");
  }
  return n;
}

}  // namespace

HermitianOperator::HermitianOperator() : m_(Matrix::Zero(1, 1)) {}

HermitianOperator HermitianOperator::from_matrix(const Matrix& m, double tol, const std::string& field) {
  require_square(m, field);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = r; c < m.cols(); ++c) {
      worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
    }
  }
  if (!(worst <= tol)) {
    throw Error(errc::kNotHermitian, field,
                "max |A_jk - conj(A_kj)| = " + std::to_string(worst) + " exceeds " + std::to_string(tol));
  }
  return symmetrized(m);
}

HermitianOperator HermitianOperator::symmetrized(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return HermitianOperator(std::move(h));
}

HermitianOperator HermitianOperator::identity(int n) {
  if (n < 1) throw Error(errc::kInvalidArgument, "dim", "dimension must be >= 1");
  return HermitianOperator(Matrix::Identity(n, n));
}

HermitianOperator HermitianOperator::zero(int n) {
  if (n < 1) throw Error(errc::kInvalidArgument, "dim", "dimension must be >= 1");
  return HermitianOperator(Matrix::Zero(n, n));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  if (values.empty()) throw Error(errc::kInvalidArgument, "dim", "dimension must be >= 1");
  const auto n = static_cast<Eigen::Index>(values.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return HermitianOperator(std::move(m));
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
  if (other.dim() != dim()) throw Error(errc::kDimensionMismatch, "operator", "sum of unequal dimensions");
  m_ += other.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& other) {
  if (other.dim() != dim()) throw Error(errc::kDimensionMismatch, "operator", "difference of unequal dimensions");
  m_ -= other.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

Matrix Spectrum::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

Spectrum eigensystem(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(errc::kInvalidArgument, "operator", "eigendecomposition did not converge");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

DensityState::DensityState() : DensityState(assume_valid(HermitianOperator::identity(1))) {}

DensityState DensityState::from_operator(const HermitianOperator& op, double psd_tol, double trace_tol,
                                         const std::string& field) {
  const double tr = op.trace();
  if (!(std::abs(tr - 1.0) <= trace_tol)) {
    throw Error(errc::kTrace, field + ".trace", "trace " + std::to_string(tr) + " differs from 1");
  }
  Spectrum spectrum = eigensystem(op);
  if (!(spectrum.values(0) >= -psd_tol)) {
    throw Error(errc::kNotPsd, field + ".psd",
                "minimum eigenvalue " + std::to_string(spectrum.values(0)) + " is negative");
  }
  return DensityState(op, std::move(spectrum));
}

DensityState DensityState::assume_valid(const HermitianOperator& op) {
  return DensityState(op, eigensystem(op));
}

DensityState DensityState::maximally_mixed(int n) {
  return assume_valid(HermitianOperator::identity(n) * (1.0 / n));
}

Complex trace_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(errc::kDimensionMismatch, "hs_inner",
                "dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  // For Hermitian b, Re Tr(ab) = sum_jk Re a_jk Re b_jk + Im a_jk Im b_jk, which
  // is a plain dot product over the interleaved storage.
  const auto count = static_cast<std::size_t>(2 * a.matrix().size());
  const auto* pa = reinterpret_cast<const double*>(a.matrix().data());
  const auto* pb = reinterpret_cast<const double*>(b.matrix().data());
  const double re = kernels::active().dot(pa, pb, count);
  const double im = trace_product(a.matrix(), b.matrix()).imag();
  if (std::abs(im) > kHermiticityTol) {
    throw Error(errc::kNotHermitian, "hs_inner", "imaginary residue " + std::to_string(im));
  }
  return re;
}

SelfAdjointBasis::SelfAdjointBasis(int dim, std::vector<HermitianOperator> elements, std::string id)
    : dim_(dim), elements_(std::move(elements)), id_(std::move(id)) {
  const auto count = static_cast<Eigen::Index>(elements_.size());
  gram_.resize(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = i; j < count; ++j) {
      const double g = hs_inner(elements_[static_cast<std::size_t>(i)], elements_[static_cast<std::size_t>(j)]);
      gram_(i, j) = g;
      gram_(j, i) = g;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(gram_, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw Error(errc::kInvalidArgument, "basis", "Gram matrix is singular; elements are linearly dependent");
  }
  condition_ = hi / lo;
}

SelfAdjointBasis SelfAdjointBasis::canonical(int n) {
  if (n < 1) throw Error(errc::kInvalidArgument, "n", "basis dimension must be >= 1");
  std::vector<HermitianOperator> elements;
  elements.reserve(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a) {
    Matrix m = Matrix::Zero(n, n);
    m(a, a) = 1.0;
    elements.push_back(HermitianOperator::from_matrix(m));
  }
  const Complex i_unit(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Matrix plus = Matrix::Zero(n, n);
      plus(a, b) = kInvSqrt2;
      plus(b, a) = kInvSqrt2;
      elements.push_back(HermitianOperator::from_matrix(plus));
      Matrix minus = Matrix::Zero(n, n);
      minus(a, b) = i_unit * kInvSqrt2;
      minus(b, a) = -i_unit * kInvSqrt2;
      elements.push_back(HermitianOperator::from_matrix(minus));
    }
  }
  return SelfAdjointBasis(n, std::move(elements), "canonical/" + std::to_string(n));
}

SelfAdjointBasis SelfAdjointBasis::from_elements(std::vector<HermitianOperator> elements, std::string id) {
  if (elements.empty()) throw Error(errc::kInvalidArgument, "basis", "no elements");
  const int n = elements.front().dim();
  if (elements.size() != static_cast<std::size_t>(n * n)) {
    throw Error(errc::kInvalidArgument, "basis",
                "expected " + std::to_string(n * n) + " elements, got " + std::to_string(elements.size()));
  }
  for (const auto& e : elements) {
    if (e.dim() != n) throw Error(errc::kDimensionMismatch, "basis", "mixed element dimensions");
  }
  return SelfAdjointBasis(n, std::move(elements), std::move(id));
}

SelfAdjointBasis build_selfadjoint_basis(int n) { return SelfAdjointBasis::canonical(n); }

void to_coordinates(const Matrix& a, std::span<double> out) {
  const auto n = static_cast<int>(a.rows());
  std::size_t k = 0;
  for (int d = 0; d < n; ++d) out[k++] = a(d, d).real();
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      out[k++] = kSqrt2 * a(r, c).real();
      out[k++] = kSqrt2 * a(r, c).imag();
    }
  }
}

RealVector to_coordinates(const HermitianOperator& a) {
  RealVector x(a.dim() * a.dim());
  to_coordinates(a.matrix(), std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
  return x;
}

void from_coordinates(std::span<const double> x, Matrix& out) {
  const int n = dim_from_coordinates(x.size());
  out.resize(n, n);
  std::size_t k = 0;
  for (int d = 0; d < n; ++d) out(d, d) = x[k++];
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      const Complex v(kInvSqrt2 * x[k], kInvSqrt2 * x[k + 1]);
      out(r, c) = v;
      out(c, r) = std::conj(v);
      k += 2;
    }
  }
}

HermitianOperator from_coordinates(std::span<const double> x, int n) {
  if (x.size() != static_cast<std::size_t>(n * n)) {
    throw Error(errc::kDimensionMismatch, "coordinates", "expected " + std::to_string(n * n) + " values");
  }
  Matrix m;
  from_coordinates(x, m);
  return HermitianOperator::symmetrized(m);
}

LogResult matrix_log(const Spectrum& spectrum, double eig_floor) {
  if (!(eig_floor > 0.0)) throw Error(errc::kInvalidArgument, "eig_floor", "must be positive");
  RealVector logs(spectrum.values.size());
  int clamped = 0;
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    double v = spectrum.values(i);
    if (v < eig_floor) {
      v = eig_floor;
      ++clamped;
    }
    logs(i) = std::log(v);
  }
  const Matrix m = spectrum.vectors * logs.cast<Complex>().asDiagonal() * spectrum.vectors.adjoint();
  return LogResult{HermitianOperator::symmetrized(m), clamped};
}

LogResult matrix_log(const DensityState& rho, double eig_floor) {
  if (!(rho.min_eigenvalue() >= -kStateTol)) {
    throw Error(errc::kNotPsd, "rho", "minimum eigenvalue " + std::to_string(rho.min_eigenvalue()));
  }
  return matrix_log(rho.spectrum(), eig_floor);
}

HermitianOperator matrix_exp_hermitian(const HermitianOperator& a) {
  const Spectrum s = eigensystem(a);
  const RealVector e = s.values.array().exp().matrix();
  return HermitianOperator::symmetrized(s.vectors * e.cast<Complex>().asDiagonal() * s.vectors.adjoint());
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  const int na = a.dim();
  const int nb = b.dim();
  Matrix m(na * nb, na * nb);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
  }
  return HermitianOperator::symmetrized(m);
}

HermitianOperator partial_trace_b(const HermitianOperator& ab, int dim_a, int dim_b) {
  if (ab.dim() != dim_a * dim_b) throw Error(errc::kDimensionMismatch, "partial_trace", "dim != dim_a * dim_b");
  Matrix m = Matrix::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) m(i, j) = ab.matrix().block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
  }
  return HermitianOperator::symmetrized(m);
}

HermitianOperator partial_trace_a(const HermitianOperator& ab, int dim_a, int dim_b) {
  if (ab.dim() != dim_a * dim_b) throw Error(errc::kDimensionMismatch, "partial_trace", "dim != dim_a * dim_b");
  Matrix m = Matrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i) m += ab.matrix().block(i * dim_b, i * dim_b, dim_b, dim_b);
  return HermitianOperator::symmetrized(m);
}

double trace_norm(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  return 0.5 * trace_norm(a - b);
}

nlohmann::json to_json(const HermitianOperator& a) {
  const int n = a.dim();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int r = 0; r < n; ++r) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ir = nlohmann::json::array();
    for (int c = 0; c < n; ++c) {
      rr.push_back(a(r, c).real());
      ir.push_back(a(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return {{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

HermitianOperator operator_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object()) throw Error(errc::kParse, field, "operator must be an object with dim/re/im");
  if (!j.contains("re")) throw Error(errc::kParse, field + ".re", "missing");
  const auto& re = j.at("re");
  if (!re.is_array() || re.empty()) throw Error(errc::kParse, field + ".re", "expected a non-empty array of rows");
  const auto n = static_cast<int>(re.size());
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer() || j.at("dim").get<int>() != n) {
      throw Error(errc::kDimensionMismatch, field + ".dim", "does not match the number of rows in re");
    }
  }
  const nlohmann::json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (im && (!im->is_array() || static_cast<int>(im->size()) != n)) {
    throw Error(errc::kDimensionMismatch, field + ".im", "row count differs from re");
  }
  Matrix m = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = re[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw Error(errc::kDimensionMismatch, field + ".re[" + std::to_string(r) + "]", "row is not of length dim");
    }
    const nlohmann::json* irow = im ? &(*im)[static_cast<std::size_t>(r)] : nullptr;
    if (irow && (!irow->is_array() || static_cast<int>(irow->size()) != n)) {
      throw Error(errc::kDimensionMismatch, field + ".im[" + std::to_string(r) + "]", "row is not of length dim");
    }
    for (int c = 0; c < n; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw Error(errc::kParse, field + ".re", "non-numeric entry");
      double iv = 0.0;
      if (irow) {
        const auto& w = (*irow)[static_cast<std::size_t>(c)];
        if (!w.is_number()) throw Error(errc::kParse, field + ".im", "non-numeric entry");
        iv = w.get<double>();
      }
      m(r, c) = Complex(v.get<double>(), iv);
    }
  }
  return HermitianOperator::from_matrix(m, kHermiticityTol, field);
}

}  // namespace sea
