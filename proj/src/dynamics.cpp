#include "sea/dynamics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <limits>

#include "sea/error.hpp"
#include "sea/kernels.hpp"

namespace sea {

void ScenarioConfig::validate() const {
  if (dim < 1) throw Error(errc::kInvalidArgument, "dim", "must be >= 1");
  if (hamiltonian.dim() != dim) throw Error(errc::kDimensionMismatch, "hamiltonian", "dimension differs from dim");
  if (rho0.dim() != dim) throw Error(errc::kDimensionMismatch, "rho0", "dimension differs from dim");
  if (!(hbar > 0.0)) throw Error(errc::kInvalidArgument, "hbar", "must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw Error(errc::kInvalidArgument, "t_final", "must be positive");
  if (generator.dissipation && (!(generator.tau > 0.0) || !std::isfinite(generator.tau))) {
    throw Error(errc::kInvalidArgument, "generator.tau", "must be positive and finite");
  }
  if (!(integrator.rtol > 0.0)) throw Error(errc::kInvalidArgument, "rtol", "must be positive");
  if (!(integrator.atol > 0.0)) throw Error(errc::kInvalidArgument, "atol", "must be positive");
  if (!(integrator.dt_init > 0.0)) throw Error(errc::kInvalidArgument, "dt_init", "must be positive");
  if (!(eig_floor > 0.0)) throw Error(errc::kInvalidArgument, "eig_floor", "must be positive");
  if (output_dt < 0.0) throw Error(errc::kInvalidArgument, "output_dt", "must be non-negative");
  for (const auto& c : generator.constraints) {
    if (c.kind == ConstraintEntry::Kind::kCustom && c.op.dim() != dim) {
      throw Error(errc::kDimensionMismatch, "generator.constraints." + c.label, "dimension differs from dim");
    }
  }
}

std::vector<HermitianOperator> constraint_observables(const ScenarioConfig& scenario) {
  std::vector<HermitianOperator> ops;
  for (const auto& c : scenario.generator.constraints) {
    switch (c.kind) {
      case ConstraintEntry::Kind::kIdentity:
        ops.push_back(HermitianOperator::identity(scenario.dim));
        break;
      case ConstraintEntry::Kind::kHamiltonian:
        ops.push_back(scenario.hamiltonian);
        break;
      case ConstraintEntry::Kind::kCustom:
        ops.push_back(c.op);
        break;
    }
  }
  return ops;
}

ConstraintSet make_constraint_set(const ScenarioConfig& scenario) {
  return build_constraint_set(scenario.dim, constraint_observables(scenario));
}

DissipativeGenerator make_generator(const ScenarioConfig& scenario) {
  ConstraintSet constraints = make_constraint_set(scenario);
  if (!scenario.generator.dissipation) return build_disabled_generator(constraints);
  return build_projector_generator(constraints, scenario.generator.tau);
}

namespace {

// Right-hand side in canonical coordinates.
class RhsEvaluator {
 public:
  RhsEvaluator(const ScenarioConfig& scenario, const DissipativeGenerator& generator)
      : generator_(generator),
        hamiltonian_(scenario.hamiltonian.matrix()),
        scale_(0.0, 1.0 / scenario.hbar),
        floor_(scenario.eig_floor),
        size_(static_cast<std::size_t>(scenario.dim) * static_cast<std::size_t>(scenario.dim)),
        log_coords_(size_),
        diss_(size_) {}

  std::size_t size() const { return size_; }

  void operator()(std::span<const double> x, std::span<double> dx) {
    from_coordinates(x, rho_);
    comm_.noalias() = rho_ * hamiltonian_;
    comm_ -= hamiltonian_ * rho_;
    comm_ *= scale_;
    to_coordinates(comm_, dx);
    if (!generator_.dissipative()) return;
    solver_.compute(rho_);
    const auto& values = solver_.eigenvalues();
    logs_.resize(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) logs_(i) = std::log(std::max(values(i), floor_));
    log_.noalias() = solver_.eigenvectors() * logs_.cast<Complex>().asDiagonal() * solver_.eigenvectors().adjoint();
    to_coordinates(log_, log_coords_);
    generator_.apply_coordinates(log_coords_, diss_);
    kernels::active().axpy(-1.0, diss_.data(), dx.data(), size_);
  }

 private:
  const DissipativeGenerator& generator_;
  const Matrix& hamiltonian_;
  Complex scale_;
  double floor_;
  std::size_t size_;
  Matrix rho_, comm_, log_;
  RealVector logs_;
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
  std::vector<double> log_coords_, diss_;
};

std::vector<double> output_schedule(const ScenarioConfig& s) {
  std::vector<double> times;
  if (!s.output_times.empty()) {
    for (double t : s.output_times) {
      if (t > 0.0 && t <= s.t_final) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty() || times.back() < s.t_final) times.push_back(s.t_final);
    return times;
  }
  const double dt = s.output_dt > 0.0 ? s.output_dt : s.t_final / 200.0;
  for (long k = 1;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= s.t_final * (1.0 - 1e-12)) break;
    times.push_back(t);
  }
  times.push_back(s.t_final);
  return times;
}

// Dormand-Prince 5(4), FSAL.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Integrator {
 public:
  Integrator(const ScenarioConfig& scenario, const DissipativeGenerator& generator)
      : s_(scenario), generator_(generator), f_(scenario, generator), n_(f_.size()) {
    for (auto& k : k_) k.assign(n_, 0.0);
    y_.assign(n_, 0.0);
    ytmp_.assign(n_, 0.0);
    ynew_.assign(n_, 0.0);
    err_.assign(n_, 0.0);
    const auto& raw = generator.constraints().raw();
    constraints_ = raw;
  }

  Trajectory run() {
    const auto& kt = kernels::active();
    Trajectory traj;
    to_coordinates(s_.rho0.op().matrix(), y_);
    double t = 0.0;
    double h = std::min(s_.integrator.dt_init, s_.t_final);
    f_(y_, k_[0]);
    int quiet_outputs = 0;
    traj.points.push_back(make_point(t));
    if (record_equilibrium(traj.points.back(), quiet_outputs)) {
      traj.termination = Termination::kEquilibrium;
      return traj;
    }

    for (double target : output_schedule(s_)) {
      while (t < target) {
        if (traj.accepted_steps + traj.rejected_steps >= s_.integrator.max_steps) {
          traj.termination = Termination::kStepFailure;
          traj.detail = "maximum step count exceeded at t=" + std::to_string(t);
          return traj;
        }
        const double remaining = target - t;
        const bool truncated = h >= remaining;
        const double hh = truncated ? remaining : h;

        stage(hh, {a21});
        f_(ytmp_, k_[1]);
        stage(hh, {a31, a32});
        f_(ytmp_, k_[2]);
        stage(hh, {a41, a42, a43});
        f_(ytmp_, k_[3]);
        stage(hh, {a51, a52, a53, a54});
        f_(ytmp_, k_[4]);
        stage(hh, {a61, a62, a63, a64, a65});
        f_(ytmp_, k_[5]);
        ynew_ = y_;
        kt.axpy(hh * b1, k_[0].data(), ynew_.data(), n_);
        kt.axpy(hh * b3, k_[2].data(), ynew_.data(), n_);
        kt.axpy(hh * b4, k_[3].data(), ynew_.data(), n_);
        kt.axpy(hh * b5, k_[4].data(), ynew_.data(), n_);
        kt.axpy(hh * b6, k_[5].data(), ynew_.data(), n_);
        f_(ynew_, k_[6]);

        std::fill(err_.begin(), err_.end(), 0.0);
        kt.axpy(hh * e1, k_[0].data(), err_.data(), n_);
        kt.axpy(hh * e3, k_[2].data(), err_.data(), n_);
        kt.axpy(hh * e4, k_[3].data(), err_.data(), n_);
        kt.axpy(hh * e5, k_[4].data(), err_.data(), n_);
        kt.axpy(hh * e6, k_[5].data(), err_.data(), n_);
        kt.axpy(hh * e7, k_[6].data(), err_.data(), n_);
        const double err = std::sqrt(kt.error_sq_sum(err_.data(), y_.data(), ynew_.data(), s_.integrator.atol,
                                                     s_.integrator.rtol, n_) /
                                     static_cast<double>(n_));

        if (!std::isfinite(err) || err > 1.0) {
          ++traj.rejected_steps;
          const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
          h = hh * std::min(1.0, factor);
          if (h < s_.integrator.dt_min) {
            traj.termination = Termination::kStepFailure;
            traj.detail = std::isfinite(err) ? "step size underflow at t=" + std::to_string(t)
                                             : "non-finite state at t=" + std::to_string(t);
            spdlog::warn("integration stopped: {}", traj.detail);
            return traj;
          }
          continue;
        }

        ++traj.accepted_steps;
        t = truncated ? target : t + hh;
        std::swap(y_, ynew_);
        std::swap(k_[0], k_[6]);
        if (repair_spectrum()) f_(y_, k_[0]);

        const double factor = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
        const double proposal = hh * factor;
        h = (truncated && factor >= 1.0) ? std::max(h, proposal) : proposal;
      }
      traj.points.push_back(make_point(t));
      if (record_equilibrium(traj.points.back(), quiet_outputs)) {
        traj.termination = Termination::kEquilibrium;
        return traj;
      }
    }
    traj.termination = Termination::kFinalTime;
    return traj;
  }

 private:
  void stage(double h, std::initializer_list<double> a) {
    ytmp_ = y_;
    std::size_t j = 0;
    for (double aj : a) kernels::active().axpy(h * aj, k_[j++].data(), ytmp_.data(), n_);
  }

  // Raises eigenvalues below the floor and renormalizes when the state has left
  // the positive cone by more than 1e-10.
  bool repair_spectrum() {
    from_coordinates(y_, rho_);
    solver_.compute(rho_);
    RealVector values = solver_.eigenvalues();
    if (values(0) >= -kStateTol) return false;
    for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = std::max(values(i), s_.eig_floor);
    values /= values.sum();
    rho_ = solver_.eigenvectors() * values.cast<Complex>().asDiagonal() * solver_.eigenvectors().adjoint();
    to_coordinates(rho_, y_);
    ++clamp_count_;
    spdlog::debug("spectral repair #{} (min eigenvalue {})", clamp_count_, solver_.eigenvalues()(0));
    return true;
  }

  bool record_equilibrium(const TrajectoryPoint& p, int& quiet) const {
    if (!s_.stop_at_equilibrium) return false;
    quiet = p.rhs_norm < s_.equilibrium_tol ? quiet + 1 : 0;
    return quiet >= s_.equilibrium_count;
  }

  TrajectoryPoint make_point(double t) {
    TrajectoryPoint p;
    p.t = t;
    p.state = DensityState::assume_valid(from_coordinates(y_, s_.dim));
    p.entropy = entropy(p.state, s_.eig_floor);
    p.entropy_production = generator_.dissipative() ? entropy_production(p.state, generator_, s_.eig_floor) : 0.0;
    p.energy = hs_inner(s_.hamiltonian, p.state.op());
    p.trace = p.state.op().trace();
    p.min_eigenvalue = p.state.min_eigenvalue();
    for (const auto& c : constraints_) p.constraint_expectations.push_back(hs_inner(c, p.state.op()));
    p.clamp_count = clamp_count_;
    p.rhs_norm = std::sqrt(kernels::active().dot(k_[0].data(), k_[0].data(), n_));
    return p;
  }

  const ScenarioConfig& s_;
  const DissipativeGenerator& generator_;
  RhsEvaluator f_;
  std::size_t n_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> y_, ytmp_, ynew_, err_;
  std::vector<HermitianOperator> constraints_;
  Matrix rho_;
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
  int clamp_count_ = 0;
};

}  // namespace

HermitianOperator rhs(const DensityState& rho, const ScenarioConfig& scenario, const DissipativeGenerator& generator) {
  if (rho.dim() != scenario.dim || generator.dim() != scenario.dim) {
    throw Error(errc::kDimensionMismatch, "rhs", "state, scenario and generator dimensions differ");
  }
  if (!(rho.min_eigenvalue() >= -kStateTol)) {
    throw Error(errc::kNotPsd, "rho", "minimum eigenvalue " + std::to_string(rho.min_eigenvalue()));
  }
  RhsEvaluator f(scenario, generator);
  const RealVector x = to_coordinates(rho.op());
  std::vector<double> dx(f.size());
  f({x.data(), f.size()}, dx);
  return from_coordinates(dx, scenario.dim);
}

double entropy(const DensityState& rho, double eig_floor) {
  double s = 0.0;
  const auto& values = rho.spectrum().values;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) >= eig_floor) s -= values(i) * std::log(values(i));
  }
  return s;
}

double entropy_production(const DensityState& rho, const DissipativeGenerator& generator, double eig_floor) {
  const RealVector log_coords = to_coordinates(matrix_log(rho, eig_floor).log);
  RealVector image(log_coords.size());
  generator.apply_coordinates({log_coords.data(), static_cast<std::size_t>(log_coords.size())},
                              {image.data(), static_cast<std::size_t>(image.size())});
  return kernels::active().dot(log_coords.data(), image.data(), static_cast<std::size_t>(image.size()));
}

Trajectory integrate(const ScenarioConfig& scenario) {
  scenario.validate();
  const DissipativeGenerator generator = make_generator(scenario);
  return integrate(scenario, generator);
}

Trajectory integrate(const ScenarioConfig& scenario, const DissipativeGenerator& generator) {
  scenario.validate();
  if (generator.dim() != scenario.dim) throw Error(errc::kDimensionMismatch, "generator", "dimension differs");
  Integrator integrator(scenario, generator);
  return integrator.run();
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kFinalTime:
      return "t_final";
    case Termination::kEquilibrium:
      return "equilibrium";
    case Termination::kStepFailure:
      return "step_failure";
  }
  return "unknown";
}

namespace {

struct Populations {
  RealVector p;
  double energy = 0.0;
};

Populations boltzmann(const RealVector& levels, double beta) {
  // Shift so every exponent is <= 0.
  const double shift = beta >= 0.0 ? levels.minCoeff() : levels.maxCoeff();
  RealVector w = (-beta * (levels.array() - shift)).exp().matrix();
  w /= w.sum();
  return Populations{w, w.dot(levels)};
}

}  // namespace

GibbsState gibbs_state(const HermitianOperator& hamiltonian, std::variant<InverseTemperature, MeanEnergy> target,
                       double energy_tol) {
  const Spectrum spec = eigensystem(hamiltonian);
  const RealVector& levels = spec.values;
  double beta = 0.0;
  int iterations = 0;

  if (const auto* b = std::get_if<InverseTemperature>(&target)) {
    if (!std::isfinite(b->beta)) throw Error(errc::kInvalidArgument, "beta", "must be finite");
    beta = b->beta;
  } else {
    const double e0 = std::get<MeanEnergy>(target).energy;
    const double lo_level = levels.minCoeff();
    const double hi_level = levels.maxCoeff();
    if (!(e0 > lo_level && e0 < hi_level)) {
      throw Error(errc::kInvalidArgument, "energy",
                  "target " + std::to_string(e0) + " is not strictly inside the spectrum [" +
                      std::to_string(lo_level) + ", " + std::to_string(hi_level) + "]");
    }
    const double norm = levels.cwiseAbs().maxCoeff();
    double lo = -50.0 / norm;
    double hi = 50.0 / norm;
    if (!(boltzmann(levels, lo).energy >= e0 && boltzmann(levels, hi).energy <= e0)) {
      throw Error(errc::kBracket, "energy", "target energy not bracketed by beta in [-50, 50]/||H||");
    }
    bool converged = false;
    for (; iterations < 2000; ++iterations) {
      const double mid = 0.5 * (lo + hi);
      const double e = boltzmann(levels, mid).energy;
      beta = mid;
      if (std::abs(e - e0) <= energy_tol) {
        converged = true;
        break;
      }
      if (mid <= lo || mid >= hi) break;
      (e > e0 ? lo : hi) = mid;
    }
    if (!converged) {
      throw Error(errc::kBracket, "energy",
                  "bisection stalled with residual " + std::to_string(boltzmann(levels, beta).energy - e0));
    }
  }

  const Populations pop = boltzmann(levels, beta);
  const Matrix rho = spec.vectors * pop.p.cast<Complex>().asDiagonal() * spec.vectors.adjoint();
  return GibbsState{DensityState::assume_valid(HermitianOperator::symmetrized(rho)), beta, iterations};
}

}  // namespace sea
