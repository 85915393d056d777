#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sea/error.hpp"
#include "sea/onsager.hpp"

using namespace sea;
using oracle::CMat;
using oracle::RMat;

namespace {

CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

DissipativeGenerator generator_for(std::vector<CMat> cs, double tau) {
  std::vector<HermitianOperator> ops;
  for (const auto& c : cs) ops.push_back(oracle::herm(c));
  return build_projector_generator(build_constraint_set(static_cast<int>(cs.front().rows()), ops), tau);
}

// Gram matrix of the projected basis, the direct reading of Tr(chi_a L chi_b)
// for a projector L at t = 0.
RMat onsager_oracle(const std::vector<CMat>& cs, double tau, int n) {
  const auto basis = oracle::basis(n);
  RMat out(n * n, n * n);
  for (int a = 0; a < n * n; ++a)
    for (int b = 0; b < n * n; ++b) out(a, b) = oracle::hs(oracle::perp(cs, basis[a]), oracle::perp(cs, basis[b])) / tau;
  return out;
}

Eigen::VectorXd sorted_eigs(const RMat& m) {
  Eigen::VectorXd v = Eigen::SelfAdjointEigenSolver<RMat>(m).eigenvalues();
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace

TEST_CASE("heisenberg transform examples") {
  oracle::Rng rng(67);
  const CMat h = rng.hermitian(3);
  const CMat chi = rng.hermitian(3);
  CHECK((heisenberg_transform(oracle::herm(chi), oracle::herm(h), 0.0, 1.0).matrix() - chi).norm() < 1e-14);
  CHECK((heisenberg_transform(oracle::herm(h * h), oracle::herm(h), 2.3, 1.0).matrix() - h * h).norm() < 1e-12);

  CMat d = CMat::Zero(2, 2);
  d(1, 1) = 1.0;
  const auto moved = heisenberg_transform(oracle::herm(pauli_x()), oracle::herm(d), std::numbers::pi, 1.0);
  CHECK((moved.matrix() + pauli_x()).norm() < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const double t = rng.uniform(0.0, 10.0);
    const double hbar = rng.uniform(0.5, 2.0);
    const auto out = heisenberg_transform(oracle::herm(chi), oracle::herm(h), t, hbar);
    CHECK(std::abs(out.frobenius_norm() - chi.norm()) <= 1e-10);
    // Direct oracle via the matrix exponential of the eigendecomposition.
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const Eigen::VectorXcd phase =
        (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0, t / hbar)).array().exp();
    const CMat u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    CHECK((out.matrix() - u * chi * u.adjoint()).norm() <= 1e-10);
  }
}

TEST_CASE("onsager matrix for a disabled generator is zero") {
  const auto cs = build_constraint_set(2, {HermitianOperator::identity(2)});
  const auto m = onsager_matrix(build_disabled_generator(cs), build_selfadjoint_basis(2),
                                oracle::herm(pauli_z()), 1.0, 1.0);
  CHECK(m.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("onsager matrix at t = 0 against the projected-Gram oracle") {
  // Constraints {I, sigma_z}: span contains every real diagonal, so both
  // diagonal projectors are annihilated and only the off-diagonal pair stays.
  const std::vector<CMat> iz{CMat::Identity(2, 2), pauli_z()};
  const auto m = onsager_matrix(generator_for(iz, 1.0), build_selfadjoint_basis(2), oracle::herm(pauli_z()), 0.0, 1.0);
  const RMat expected = onsager_oracle(iz, 1.0, 2);
  CHECK((m.entries - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(m.entries(0, 0)) <= 1e-12);
  CHECK(std::abs(m.entries(1, 1)) <= 1e-12);
  CHECK(m.entries(2, 2) == doctest::Approx(1.0));
  CHECK(m.entries(3, 3) == doctest::Approx(1.0));
  CHECK(std::abs(m.entries(0, 1)) <= 1e-12);

  // With the identity alone the diagonal projectors keep their traceless part.
  const std::vector<CMat> i_only{CMat::Identity(2, 2)};
  const auto mi = onsager_matrix(generator_for(i_only, 1.0), build_selfadjoint_basis(2), oracle::herm(pauli_z()), 0.0, 1.0);
  CHECK((mi.entries - onsager_oracle(i_only, 1.0, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(mi.entries(0, 0) == doctest::Approx(0.5));
  CHECK(mi.entries(1, 1) == doctest::Approx(0.5));
  CHECK(mi.entries(0, 1) == doctest::Approx(-0.5));
  CHECK(mi.entries(2, 2) == doctest::Approx(1.0));
  CHECK(mi.entries(3, 3) == doctest::Approx(1.0));
}

TEST_CASE("onsager trace equals (n^2 - rank) / tau at any time") {
  oracle::Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.integer(2, 4);
    const CMat h = rng.hermitian(n);
    const double tau = rng.uniform(0.5, 3.0);
    const auto g = generator_for({CMat::Identity(n, n), h}, tau);
    const auto basis = build_selfadjoint_basis(n);
    for (int k = 0; k < 5; ++k) {
      const auto m = onsager_matrix(g, basis, oracle::herm(h), rng.uniform(0.0, 10.0), 1.0);
      CHECK(m.entries.trace() == doctest::Approx((n * n - g.constraints().rank()) / tau).epsilon(1e-10));
    }
  }
}

TEST_CASE("reciprocity and time covariance on random scenarios") {
  oracle::Rng rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.integer(2, 4);
    const CMat h = rng.hermitian(n);
    const auto g = generator_for({CMat::Identity(n, n), h, rng.hermitian(n)}, rng.uniform(0.5, 3.0));
    const auto basis = build_selfadjoint_basis(n);
    const auto e0 = sorted_eigs(onsager_matrix(g, basis, oracle::herm(h), 0.0, 1.0).entries);
    for (int k = 0; k < 10; ++k) {
      const auto m = onsager_matrix(g, basis, oracle::herm(h), rng.uniform(0.0, 10.0), 1.0);
      const auto r = check_reciprocity(m);
      CHECK(r.passed());
      CHECK(r.max_asymmetry <= 1e-10);
      CHECK(r.max_imag_residue <= 1e-12);
      CHECK((sorted_eigs(m.entries) - e0).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("basis re-mixing transforms the matrix by congruence") {
  oracle::Rng rng(79);
  const int n = 3;
  const CMat h = rng.hermitian(n);
  const auto g = generator_for({CMat::Identity(n, n), h}, 1.5);
  const auto canonical = build_selfadjoint_basis(n);
  const RMat q = rng.orthogonal(n * n);
  std::vector<HermitianOperator> mixed;
  for (int a = 0; a < n * n; ++a) {
    CMat e = CMat::Zero(n, n);
    for (int b = 0; b < n * n; ++b) e += q(a, b) * canonical.elements()[b].matrix();
    mixed.push_back(oracle::herm(e));
  }
  const auto other = SelfAdjointBasis::from_elements(mixed, "mixed");
  CHECK(other.condition_number() == doctest::Approx(1.0).epsilon(1e-9));
  const double t = 1.7;
  const RMat m0 = onsager_matrix(g, canonical, oracle::herm(h), t, 1.0).entries;
  const RMat m1 = onsager_matrix(g, other, oracle::herm(h), t, 1.0).entries;
  CHECK((m1 - q * m0 * q.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("reciprocity check reports injected defects") {
  const auto g = generator_for({CMat::Identity(2, 2), pauli_z()}, 1.0);
  auto m = onsager_matrix(g, build_selfadjoint_basis(2), oracle::herm(pauli_z()), 0.4, 1.0);
  CHECK(check_reciprocity(m).passed());
  m.entries(2, 3) += 1e-6;
  const auto r = check_reciprocity(m);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.symmetric_ok);
  CHECK(r.max_asymmetry == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("onsager construction escalates a non-hermitian generator") {
  const auto cs = build_constraint_set(2, {HermitianOperator::identity(2)});
  GeneratorMatrix rep = build_projector_generator(cs, 1.0).matrix_rep();
  rep(2, 3) += 0.1;
  const auto bad = DissipativeGenerator::from_matrix(cs, 1.0, rep);
  CHECK_THROWS_AS(onsager_matrix(bad, build_selfadjoint_basis(2), oracle::herm(pauli_z()), 0.0, 1.0), Error);

  // Below the escalation threshold the defect is a report entry.
  rep = build_projector_generator(cs, 1.0).matrix_rep();
  rep(2, 3) += 1e-9;
  const auto slight = DissipativeGenerator::from_matrix(cs, 1.0, rep);
  const auto m = onsager_matrix(slight, build_selfadjoint_basis(2), oracle::herm(pauli_z()), 0.0, 1.0);
  CHECK_FALSE(check_reciprocity(m).passed());
}
