#include "sea/onsager.hpp"

#include <algorithm>
#include <cmath>

#include "sea/error.hpp"

namespace sea {

HermitianOperator heisenberg_transform(const HermitianOperator& chi, const HermitianOperator& hamiltonian, double t,
                                       double hbar) {
  if (chi.dim() != hamiltonian.dim()) {
    throw Error(errc::kDimensionMismatch, "heisenberg_transform", "observable and Hamiltonian dimensions differ");
  }
  if (!(hbar > 0.0)) throw Error(errc::kInvalidArgument, "hbar", "must be positive");
  const Spectrum s = eigensystem(hamiltonian);
  Eigen::VectorXcd phases(s.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, s.values(i) * t / hbar);
  const Matrix u = s.vectors * phases.asDiagonal() * s.vectors.adjoint();
  return HermitianOperator::symmetrized(u * chi.matrix() * u.adjoint());
}

OnsagerMatrix onsager_matrix(const DissipativeGenerator& generator, const SelfAdjointBasis& basis,
                             const HermitianOperator& hamiltonian, double t, double hbar) {
  if (basis.dim() != generator.dim() || hamiltonian.dim() != generator.dim()) {
    throw Error(errc::kDimensionMismatch, "onsager_matrix", "basis, generator and Hamiltonian dimensions differ");
  }
  const auto count = static_cast<Eigen::Index>(basis.size());
  std::vector<HermitianOperator> transformed;
  std::vector<HermitianOperator> images;
  transformed.reserve(basis.size());
  images.reserve(basis.size());
  for (const auto& chi : basis.elements()) {
    transformed.push_back(heisenberg_transform(chi, hamiltonian, t, hbar));
    images.push_back(generator.apply(transformed.back()));
  }

  OnsagerMatrix m;
  m.t = t;
  m.basis_id = basis.id();
  m.entries.resize(count, count);
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index b = 0; b < count; ++b) {
      const Complex v = trace_product(transformed[static_cast<std::size_t>(a)].matrix(),
                                      images[static_cast<std::size_t>(b)].matrix());
      m.max_imag_residue = std::max(m.max_imag_residue, std::abs(v.imag()));
      m.entries(a, b) = v.real();
    }
  }

  const double asymmetry = (m.entries - m.entries.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-8) {
    throw Error(errc::kVerification, "onsager_matrix",
                "coefficient matrix asymmetry " + std::to_string(asymmetry) + " indicates a non-Hermitian generator");
  }
  return m;
}

ReciprocityReport check_reciprocity(const OnsagerMatrix& m, double tol) {
  ReciprocityReport r;
  r.tolerance = tol;
  r.max_asymmetry = (m.entries - m.entries.transpose()).cwiseAbs().maxCoeff();
  r.max_imag_residue = m.max_imag_residue;
  const RealMatrix sym = 0.5 * (m.entries + m.entries.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues().minCoeff();
  r.symmetric_ok = r.max_asymmetry <= tol;
  r.real_ok = r.max_imag_residue <= kHermiticityTol;
  r.psd_ok = r.min_eigenvalue >= -tol;
  return r;
}

nlohmann::json ReciprocityReport::to_json() const {
  return {{"max_asymmetry", max_asymmetry}, {"max_imag_residue", max_imag_residue},
          {"min_eigenvalue", min_eigenvalue}, {"tolerance", tolerance},
          {"symmetric_ok", symmetric_ok},     {"real_ok", real_ok},
          {"psd_ok", psd_ok},                 {"passed", passed()}};
}

}  // namespace sea
