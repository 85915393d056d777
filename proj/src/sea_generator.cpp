#include "sea/sea_generator.hpp"

#include <algorithm>
#include <cmath>

#include "sea/error.hpp"
#include "sea/kernels.hpp"

namespace sea {
namespace {

bool is_identity(const HermitianOperator& a) {
  return (a.matrix() - Matrix::Identity(a.dim(), a.dim())).norm() <= kHermiticityTol;
}

std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

ConstraintSet build_constraint_set(int dim, std::vector<HermitianOperator> observables, double rank_tol) {
  if (dim < 1) throw Error(errc::kInvalidArgument, "constraints.dim", "dimension must be >= 1");
  if (!(rank_tol > 0.0)) throw Error(errc::kInvalidArgument, "constraints.rank_tol", "must be positive");
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (observables[i].dim() != dim) {
      throw Error(errc::kDimensionMismatch, "constraints[" + std::to_string(i) + "]",
                  "dimension " + std::to_string(observables[i].dim()) + " != " + std::to_string(dim));
    }
  }
  if (observables.empty() || !is_identity(observables.front())) {
    observables.insert(observables.begin(), HermitianOperator::identity(dim));
  }

  ConstraintSet set;
  set.dim_ = dim;
  set.raw_ = std::move(observables);

  const auto size = static_cast<Eigen::Index>(dim) * dim;
  std::vector<RealVector> basis;
  for (const auto& c : set.raw_) {
    RealVector v = to_coordinates(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
    const double norm = v.norm();
    if (norm < rank_tol) continue;
    basis.push_back(v / norm);
  }

  set.q_.resize(size, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    set.q_.col(static_cast<Eigen::Index>(k)) = basis[k];
    set.ortho_.push_back(from_coordinates(as_span(basis[k]), dim));
  }
  return set;
}

HermitianOperator ConstraintSet::project(const HermitianOperator& a) const {
  if (a.dim() != dim_) throw Error(errc::kDimensionMismatch, "project", "operator dimension differs");
  const RealVector x = to_coordinates(a);
  const RealVector p = q_ * (q_.transpose() * x);
  return from_coordinates(as_span(p), dim_);
}

DissipativeGenerator DissipativeGenerator::from_matrix(ConstraintSet constraints, double tau, GeneratorMatrix rep) {
  const auto size = static_cast<Eigen::Index>(constraints.dim()) * constraints.dim();
  if (rep.rows() != size || rep.cols() != size) {
    throw Error(errc::kDimensionMismatch, "generator.matrix_rep", "expected n^2 x n^2");
  }
  if (!(tau > 0.0)) throw Error(errc::kInvalidArgument, "generator.tau", "must be positive");
  return DissipativeGenerator(std::move(constraints), tau, std::move(rep));
}

void DissipativeGenerator::apply_coordinates(std::span<const double> x, std::span<double> out) const {
  kernels::active().gemv(rep_.data(), x.data(), out.data(), static_cast<std::size_t>(rep_.rows()),
                         static_cast<std::size_t>(rep_.cols()));
}

HermitianOperator DissipativeGenerator::apply(const HermitianOperator& a) const {
  if (a.dim() != dim()) {
    throw Error(errc::kDimensionMismatch, "apply_generator",
                "operator dim " + std::to_string(a.dim()) + " != generator dim " + std::to_string(dim()));
  }
  const RealVector x = to_coordinates(a);
  RealVector y(x.size());
  apply_coordinates(as_span(x), {y.data(), static_cast<std::size_t>(y.size())});
  return from_coordinates(as_span(y), dim());
}

HermitianOperator apply_generator(const DissipativeGenerator& generator, const HermitianOperator& a) {
  return generator.apply(a);
}

DissipativeGenerator build_projector_generator(const ConstraintSet& constraints, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(errc::kInvalidArgument, "generator.tau", "tau must be positive and finite");
  }
  const int n = constraints.dim();
  const auto size = static_cast<Eigen::Index>(n) * n;
  const RealMatrix& q = constraints.ortho_coordinates();
  // Column j holds the coordinates of Pi_perp(e_j) / tau.
  GeneratorMatrix rep(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    RealVector e = RealVector::Unit(size, j);
    e -= q * q.row(j).transpose();
    rep.col(j) = e / tau;
  }
  DissipativeGenerator generator = DissipativeGenerator::from_matrix(constraints, tau, std::move(rep));
  const VerificationReport report = verify_generator(generator);
  if (!report.passed() || !report.projector_spectrum_ok) {
    throw Error(errc::kVerification, "generator", "projector generator failed verification: " +
                                                      report.to_json().dump());
  }
  return generator;
}

DissipativeGenerator build_disabled_generator(const ConstraintSet& constraints) {
  const auto size = static_cast<Eigen::Index>(constraints.dim()) * constraints.dim();
  return DissipativeGenerator::from_matrix(constraints, std::numeric_limits<double>::infinity(),
                                           GeneratorMatrix::Zero(size, size));
}

VerificationReport verify_generator(const DissipativeGenerator& generator, double tol, double spectrum_tol) {
  const GeneratorMatrix& m = generator.matrix_rep();
  VerificationReport report;
  report.tolerance = tol;
  report.hermiticity_violation = (m - m.transpose()).cwiseAbs().maxCoeff();

  const RealMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym, Eigen::EigenvaluesOnly);
  const RealVector& ev = solver.eigenvalues();
  report.min_eigenvalue = ev.minCoeff();

  const double rate = generator.dissipative() ? 1.0 / generator.tau() : 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    report.spectrum_deviation =
        std::max(report.spectrum_deviation, std::min(std::abs(ev(i)), std::abs(ev(i) - rate)));
  }

  for (const auto& c : generator.constraints().raw()) {
    report.max_constraint_residual =
        std::max(report.max_constraint_residual, generator.apply(c).frobenius_norm());
  }

  report.hermitian_ok = report.hermiticity_violation <= tol;
  report.psd_ok = report.min_eigenvalue >= -tol;
  report.kernel_ok = report.max_constraint_residual <= tol;
  report.projector_spectrum_ok = report.spectrum_deviation <= spectrum_tol;
  return report;
}

nlohmann::json VerificationReport::to_json() const {
  return {{"hermiticity_violation", hermiticity_violation},
          {"min_eigenvalue", min_eigenvalue},
          {"max_constraint_residual", max_constraint_residual},
          {"spectrum_deviation", spectrum_deviation},
          {"tolerance", tolerance},
          {"hermitian_ok", hermitian_ok},
          {"psd_ok", psd_ok},
          {"kernel_ok", kernel_ok},
          {"projector_spectrum_ok", projector_spectrum_ok},
          {"passed", passed()}};
}

}  // namespace sea
