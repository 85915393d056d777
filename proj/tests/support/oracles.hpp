#pragma once

// Random inputs and reference computations for the test suites. The oracles
// here avoid the library's own code paths: projections go through a normal
// equation on the raw constraints, the basis is spelled out entry by entry,
// and entropies come straight from Eigen eigenvalues.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "sea/dynamics.hpp"
#include "sea/operator_space.hpp"

namespace oracle {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  CMat complex_matrix(int n) {
    CMat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = Complex(normal(), normal());
    return m;
  }

  CMat hermitian(int n) {
    const CMat m = complex_matrix(n);
    return (m + m.adjoint()) / 2.0;
  }

  CMat unitary(int n) {
    Eigen::HouseholderQR<CMat> qr(complex_matrix(n));
    return qr.householderQ() * CMat::Identity(n, n);
  }

  // Full-rank state with every eigenvalue at least min_eig.
  CMat density(int n, double min_eig = 1e-3) {
    const CMat w = complex_matrix(n);
    CMat rho = w * w.adjoint();
    rho /= rho.trace().real();
    const double p = min_eig * n;
    rho = (1.0 - p) * rho + p * CMat::Identity(n, n) / static_cast<double>(n);
    return (rho + rho.adjoint()) / 2.0;
  }

  RMat orthogonal(int n) {
    RMat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = normal();
    Eigen::HouseholderQR<RMat> qr(m);
    return qr.householderQ() * RMat::Identity(n, n);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
};

inline double hs(const CMat& a, const CMat& b) { return (a.adjoint() * b).trace().real(); }

inline CMat unit(int n, int r, int c) {
  CMat e = CMat::Zero(n, n);
  e(r, c) = 1.0;
  return e;
}

// |aa), then |ab+), |ab-) for a < b.
inline std::vector<CMat> basis(int n) {
  std::vector<CMat> out;
  for (int a = 0; a < n; ++a) out.push_back(unit(n, a, a));
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      out.push_back(s * (unit(n, a, b) + unit(n, b, a)));
      out.push_back(i * s * (unit(n, a, b) - unit(n, b, a)));
    }
  }
  return out;
}

// Orthogonal projection of a onto span(cs)^perp using the pseudo-inverse of
// the raw Gram matrix.
inline CMat perp(const std::vector<CMat>& cs, const CMat& a) {
  const int m = static_cast<int>(cs.size());
  RMat g(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    rhs(i) = hs(cs[i], a);
    for (int j = 0; j < m; ++j) g(i, j) = hs(cs[i], cs[j]);
  }
  const Eigen::VectorXd c = g.completeOrthogonalDecomposition().pseudoInverse() * rhs;
  CMat out = a;
  for (int i = 0; i < m; ++i) out -= c(i) * cs[i];
  return out;
}

inline Eigen::VectorXd eigenvalues(const CMat& a) { return Eigen::SelfAdjointEigenSolver<CMat>(a).eigenvalues(); }

inline double entropy(const CMat& rho) {
  double s = 0.0;
  for (double l : eigenvalues(rho)) {
    if (l > 1e-300) s -= l * std::log(l);
  }
  return s;
}

inline CMat log_psd(const CMat& rho) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho);
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() * es.eigenvectors().adjoint();
}

inline double trace_distance(const CMat& a, const CMat& b) { return 0.5 * eigenvalues(a - b).cwiseAbs().sum(); }

// rho_dot from the defining formula with the oracle projector.
inline CMat rhs(const CMat& rho, const CMat& h, const std::vector<CMat>& cs, double tau, double hbar = 1.0) {
  const Complex i(0.0, 1.0);
  CMat out = (i / hbar) * (rho * h - h * rho);
  if (std::isfinite(tau)) out -= perp(cs, log_psd(rho)) / tau;
  return out;
}

// Classical fixed-step RK4 on the matrix equation.
inline CMat rk4(CMat rho, const CMat& h, const std::vector<CMat>& cs, double tau, double t, int steps) {
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    const CMat k1 = rhs(rho, h, cs, tau);
    const CMat k2 = rhs(rho + 0.5 * dt * k1, h, cs, tau);
    const CMat k3 = rhs(rho + 0.5 * dt * k2, h, cs, tau);
    const CMat k4 = rhs(rho + dt * k3, h, cs, tau);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = (rho + rho.adjoint()) / 2.0;
  }
  return rho;
}

inline sea::HermitianOperator herm(const CMat& m) { return sea::HermitianOperator::symmetrized(m); }
inline sea::DensityState state(const CMat& m) { return sea::DensityState::from_operator(herm(m)); }

inline sea::ScenarioConfig scenario(const CMat& h, const CMat& rho0, double tau = 1.0, double t_final = 50.0) {
  sea::ScenarioConfig s;
  s.dim = static_cast<int>(h.rows());
  s.hamiltonian = herm(h);
  s.rho0 = state(rho0);
  s.generator.tau = tau;
  s.t_final = t_final;
  s.stop_at_equilibrium = false;
  return s;
}

inline double spectral_norm(const CMat& h) { return eigenvalues(h).cwiseAbs().maxCoeff(); }

}  // namespace oracle
