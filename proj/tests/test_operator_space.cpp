#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sea/error.hpp"
#include "sea/operator_space.hpp"

using namespace sea;
using oracle::CMat;
using oracle::Complex;

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

CMat coherent() {
  CMat m(2, 2);
  m << 0.9, 0.2, 0.2, 0.1;
  return m;
}

}  // namespace

TEST_CASE("hs_inner examples") {
  CHECK(hs_inner(HermitianOperator::identity(2), HermitianOperator::identity(2)) == doctest::Approx(2.0));
  CHECK(std::abs(hs_inner(oracle::herm(pauli_x()), oracle::herm(pauli_z()))) < 1e-15);
  const double a[] = {0.9, 0.1};
  const double b[] = {0.0, 1.0};
  CHECK(hs_inner(HermitianOperator::diagonal(a), HermitianOperator::diagonal(b)) == doctest::Approx(0.1));
  CHECK_THROWS_AS(hs_inner(HermitianOperator::identity(2), HermitianOperator::identity(3)), Error);
}

TEST_CASE("hermiticity is validated on construction") {
  CMat m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 0;
  CHECK_THROWS_AS(HermitianOperator::from_matrix(m), Error);
  m(1, 0) = Complex(0, -1);
  CHECK_NOTHROW(HermitianOperator::from_matrix(m));
}

TEST_CASE("density state validation names the failing property") {
  CMat m = coherent() * 1.1;
  try {
    DensityState::from_operator(oracle::herm(m));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.field() == "rho.trace");
  }
  CMat neg(2, 2);
  neg << 1.2, 0, 0, -0.2;
  try {
    DensityState::from_operator(oracle::herm(neg));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.field() == "rho.psd");
  }
}

TEST_CASE("canonical basis examples") {
  const auto b1 = build_selfadjoint_basis(1);
  REQUIRE(b1.size() == 1);
  CHECK(b1.elements()[0](0, 0) == Complex(1.0, 0.0));

  const auto b2 = build_selfadjoint_basis(2);
  REQUIRE(b2.size() == 4);
  const double s = 1.0 / std::sqrt(2.0);
  CMat e2(2, 2), e3(2, 2);
  e2 << 0, s, s, 0;
  e3 << 0, Complex(0, s), Complex(0, -s), 0;
  CHECK((b2.elements()[0].matrix() - oracle::unit(2, 0, 0)).norm() < 1e-15);
  CHECK((b2.elements()[1].matrix() - oracle::unit(2, 1, 1)).norm() < 1e-15);
  CHECK((b2.elements()[2].matrix() - e2).norm() < 1e-15);
  CHECK((b2.elements()[3].matrix() - e3).norm() < 1e-15);

  const auto b3 = build_selfadjoint_basis(3);
  REQUIRE(b3.size() == 9);
  const auto ref = oracle::basis(3);
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const double g = oracle::hs(b3.elements()[i].matrix(), b3.elements()[j].matrix());
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
    CHECK((b3.elements()[i].matrix() - ref[i]).norm() < 1e-15);
  }
  CHECK(worst < 1e-12);
  CHECK(b3.condition_number() == doctest::Approx(1.0));
}

TEST_CASE("orthonormality and completeness for n <= 6") {
  oracle::Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    const auto basis = build_selfadjoint_basis(n);
    const auto& el = basis.elements();
    REQUIRE(static_cast<int>(el.size()) == n * n);
    double worst = 0.0;
    for (std::size_t i = 0; i < el.size(); ++i) {
      for (std::size_t j = 0; j < el.size(); ++j) {
        worst = std::max(worst, std::abs(oracle::hs(el[i].matrix(), el[j].matrix()) - (i == j ? 1.0 : 0.0)));
      }
    }
    CHECK(worst <= 1e-12);
    CHECK((basis.gram() - oracle::RMat::Identity(n * n, n * n)).cwiseAbs().maxCoeff() <= 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
      const CMat a = rng.hermitian(n);
      CMat sum = CMat::Zero(n, n);
      for (const auto& e : el) sum += oracle::hs(e.matrix(), a) * e.matrix();
      CHECK((sum - a).norm() <= 1e-10);
    }
  }
}

TEST_CASE("coordinates are an isometry and round trip") {
  oracle::Rng rng(5);
  for (int n = 1; n <= 5; ++n) {
    const CMat a = rng.hermitian(n);
    const CMat b = rng.hermitian(n);
    const auto xa = to_coordinates(oracle::herm(a));
    const auto xb = to_coordinates(oracle::herm(b));
    CHECK(xa.dot(xb) == doctest::Approx(oracle::hs(a, b)).epsilon(1e-12));
    const auto back = from_coordinates(std::span<const double>(xa.data(), xa.size()), n);
    CHECK((back.matrix() - a).norm() < 1e-12);
    const auto basis = oracle::basis(n);
    for (int i = 0; i < n * n; ++i) CHECK(xa(i) == doctest::Approx(oracle::hs(basis[i], a)).epsilon(1e-12));
  }
}

TEST_CASE("matrix_log examples") {
  auto r = matrix_log(DensityState::maximally_mixed(2));
  CHECK(r.clamped == 0);
  CHECK((r.log.matrix() + std::log(2.0) * CMat::Identity(2, 2)).norm() < 1e-14);

  const double d[] = {0.9, 0.1};
  r = matrix_log(DensityState::from_operator(HermitianOperator::diagonal(d)));
  CHECK(r.log(0, 0).real() == doctest::Approx(std::log(0.9)));
  CHECK(r.log(1, 1).real() == doctest::Approx(std::log(0.1)));

  r = matrix_log(oracle::state(coherent()));
  const auto ev = oracle::eigenvalues(r.log.matrix());
  const double root = std::sqrt(0.16 + 0.04);
  CHECK(ev(0) == doctest::Approx(std::log(0.5 - root)).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(std::log(0.5 + root)).epsilon(1e-12));
  CHECK(std::exp(ev(1)) == doctest::Approx(0.94721).epsilon(1e-5));
  CHECK(std::exp(ev(0)) == doctest::Approx(0.05279).epsilon(1e-4));
}

TEST_CASE("matrix_log clamps singular states and reports it") {
  const double d[] = {1.0, 0.0};
  const auto r = matrix_log(DensityState::from_operator(HermitianOperator::diagonal(d)), 1e-12);
  CHECK(r.clamped == 1);
  CHECK(r.log(1, 1).real() == doctest::Approx(std::log(1e-12)));
}

TEST_CASE("matrix_exp_hermitian examples") {
  CHECK((matrix_exp_hermitian(HermitianOperator::zero(3)).matrix() - CMat::Identity(3, 3)).norm() < 1e-15);
  const double d[] = {1.0, 2.0};
  const auto e = matrix_exp_hermitian(HermitianOperator::diagonal(d));
  CHECK(e(0, 0).real() == doctest::Approx(std::numbers::e));
  CHECK(e(1, 1).real() == doctest::Approx(std::exp(2.0)));
  const double t = 0.3;
  const CMat expected = std::cosh(t) * CMat::Identity(2, 2) + std::sinh(t) * pauli_x();
  CHECK((matrix_exp_hermitian(oracle::herm(t * pauli_x())).matrix() - expected).norm() < 1e-14);
}

TEST_CASE("exp(log rho) reconstructs full-rank states") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 6);
    const CMat rho = rng.density(n, 1e-6);
    const auto l = matrix_log(oracle::state(rho));
    CHECK(l.clamped == 0);
    CHECK((matrix_exp_hermitian(l.log).matrix() - rho).norm() <= 1e-9);
  }
}

TEST_CASE("matrix_log is unitarily covariant") {
  oracle::Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(2, 6);
    const CMat rho = rng.density(n, 1e-4);
    const CMat u = rng.unitary(n);
    const CMat lhs = matrix_log(oracle::state(u * rho * u.adjoint())).log.matrix();
    const CMat rhs = u * matrix_log(oracle::state(rho)).log.matrix() * u.adjoint();
    CHECK((lhs - rhs).norm() <= 1e-9);
  }
}

TEST_CASE("kron and partial traces") {
  oracle::Rng rng(13);
  const CMat a = rng.density(2);
  const CMat b = rng.density(3);
  const auto ab = kron(oracle::herm(a), oracle::herm(b));
  CHECK((partial_trace_b(ab, 2, 3).matrix() - a).norm() < 1e-14);
  CHECK((partial_trace_a(ab, 2, 3).matrix() - b).norm() < 1e-14);
  CHECK(ab(1, 4) == a(0, 1) * b(1, 1));
}

TEST_CASE("trace distance against eigenvalue oracle") {
  oracle::Rng rng(17);
  const CMat a = rng.density(4);
  const CMat b = rng.density(4);
  CHECK(trace_distance(oracle::herm(a), oracle::herm(b)) == doctest::Approx(oracle::trace_distance(a, b)));
}

TEST_CASE("operator JSON round trip re-validates") {
  oracle::Rng rng(19);
  const auto a = oracle::herm(rng.hermitian(3));
  const auto back = operator_from_json(to_json(a));
  CHECK((back.matrix() - a.matrix()).norm() == 0.0);
  auto j = to_json(a);
  j["im"][0][1] = 5.0;
  CHECK_THROWS_AS(operator_from_json(j), Error);
  j = to_json(a);
  j["dim"] = 4;
  CHECK_THROWS_AS(operator_from_json(j), Error);
}
