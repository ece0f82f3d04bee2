#include "fmslab/floquet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

double fold(double x, double omega) {
  const double shifted = std::fmod(x + omega / 2.0, omega);
  return (shifted < 0.0 ? shifted + omega : shifted) - omega / 2.0;
}

// Normalized monodromy from the scaled product, using the analytic determinant to avoid
// cancellation when U is nearly rank one.
CMatrix normalized_from(const Evolution& e) {
  const double n = static_cast<double>(e.unit.rows());
  CMatrix m = e.unit * std::exp(e.log_scale + I * e.trace_integral / n);
  if (e.unit.rows() == 2 && m.trace().real() < 0.0) m = -m;
  return m;
}

std::vector<cplx> quasienergies_scaled(const CMatrix& unit, double log_scale, double period) {
  const double omega = 2.0 * kPi / period;
  std::vector<cplx> out;
  for (const auto& ep : eig_small(unit)) {
    if (std::abs(ep.value) == 0.0) throw NumericalError("quasienergies: singular monodromy");
    const cplx log_mu = std::log(ep.value) + log_scale;
    const cplx eps = I * log_mu / period;
    out.emplace_back(fold(eps.real(), omega), eps.imag());
  }
  return out;
}

MonodromyResult finish(const Evolution& e, double period) {
  MonodromyResult r;
  r.evolution = e;
  r.monodromy = e.matrix();
  r.normalized = normalized_from(e);
  r.quasienergies = quasienergies_scaled(e.unit, e.log_scale, period);
  r.unipotent = unipotent_part(r.normalized);
  r.stokes_invariant = r.normalized.trace().imag();
  r.step_count_used = e.steps;
  r.period = period;
  return r;
}

}  // namespace

CMatrix Evolution::matrix() const { return unit * std::exp(log_scale); }

Evolution evolve(const HamiltonianFn& h, double t0, double t1, int steps) {
  if (steps < 1) throw NumericalError("evolve: steps must be positive");
  const double dt = (t1 - t0) / steps;
  Evolution e;
  CMatrix u;
  for (int j = 0; j < steps; ++j) {
    const CMatrix hj = h(t0 + (j + 0.5) * dt);
    if (j == 0) u = identity(static_cast<int>(hj.rows()));
    e.trace_integral += hj.trace() * dt;
    u = expm(-I * dt * hj) * u;
    const double nrm = u.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("evolve: propagator collapsed");
    u /= nrm;
    e.log_scale += std::log(nrm);
  }
  e.unit = u;
  e.steps = steps;
  return e;
}

MonodromyResult propagate(const HamiltonianFn& h, double period, int steps,
                          const PropagateOptions& opts) {
  if (steps < 1) throw NumericalError("propagate: steps must be positive");
  Evolution coarse = evolve(h, 0.0, period, steps);
  int n = steps;
  for (;;) {
    Evolution fine = evolve(h, 0.0, period, 2 * n);
    const double diff =
        (coarse.unit * std::exp(coarse.log_scale - fine.log_scale) - fine.unit).norm();
    const double rel = diff / fine.unit.norm();
    if (rel < opts.tolerance || 4 * n > opts.max_steps) {
      MonodromyResult r = finish(fine, period);
      r.relative_change = rel;
      r.converged = rel < opts.tolerance;
      if (!r.converged && opts.require_convergence) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "propagate: not converged at " << 2 * n << " steps: ||U_N - U_2N|| = "
            << diff * std::exp(fine.log_scale) << ", ||U_2N|| = " << std::exp(fine.log_scale)
            << " (relative " << rel << ", tolerance " << opts.tolerance << ")";
        throw NumericalError(msg.str());
      }
      return r;
    }
    coarse = std::move(fine);
    n *= 2;
  }
}

MonodromyResult propagate(const ModelSpec& model, const TrajectorySpec& traj,
                          const PropagateOptions& opts) {
  if (traj.steps < 64) throw NumericalError("propagate: steps must be >= 64");
  const HamiltonianFn h = [&](double t) { return hamiltonian(model, trajectory_point(traj, t)); };
  return propagate(h, traj.period(), traj.steps, opts);
}

std::vector<cplx> quasienergies(const CMatrix& m, double period) {
  if (!(period > 0.0)) throw NumericalError("quasienergies: period must be positive");
  if (std::abs(m.determinant()) == 0.0) throw NumericalError("quasienergies: singular monodromy");
  return quasienergies_scaled(m, 0.0, period);
}

double quasienergy_splitting(const std::vector<cplx>& eps, double period) {
  if (eps.size() < 2) return 0.0;
  const double omega = 2.0 * kPi / period;
  const double d = std::fmod(std::abs(eps[0].real() - eps[1].real()), omega);
  return std::min(d, omega - d);
}

CMatrix normalize(const CMatrix& m) {
  const cplx det = m.determinant();
  if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) {
    throw NumericalError("normalize: determinant is zero or non-finite");
  }
  const int n = static_cast<int>(m.rows());
  const cplx root = std::pow(det, 1.0 / n);
  CMatrix out = m / root;
  // Among the n admissible roots pick the one with the largest real trace (for n = 2 this is the
  // nonnegative-real-trace branch).
  CMatrix best = out;
  for (int k = 1; k < n; ++k) {
    const CMatrix cand = out * std::polar(1.0, -2.0 * kPi * k / n);
    if (cand.trace().real() > best.trace().real()) best = cand;
  }
  return best;
}

CMatrix unipotent_part(const CMatrix& normalized, double tol) {
  const auto eig = eig_small(normalized);
  cplx mean = 0.0;
  for (const auto& e : eig) mean += e.value;
  mean /= static_cast<double>(eig.size());
  for (const auto& e : eig) {
    if (std::abs(e.value - mean) >= tol) return identity(static_cast<int>(normalized.rows()));
  }
  if (std::abs(mean) == 0.0) return identity(static_cast<int>(normalized.rows()));
  return normalized / mean;
}

double stokes_invariant(const MonodromyResult& result) { return result.normalized.trace().imag(); }

double monodromy_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericalError("monodromy_fidelity: dimension mismatch");
  }
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("monodromy_fidelity: zero matrix");
  const cplx overlap = (a.adjoint() * b).trace();
  return std::min(1.0, std::abs(overlap) / (na * nb));
}

double dark_state_phase(const ModelSpec& model, const TrajectorySpec& traj, int n_periods) {
  if (n_periods < 1) throw NumericalError("dark_state_phase: n_periods must be >= 1");
  const double period = traj.period();
  const int steps = traj.steps * n_periods;
  const double dt = period / traj.steps;

  auto eig_at = [&](double t) { return eig_small(hamiltonian(model, trajectory_point(traj, t))); };
  auto start = eig_at(0.0);
  // Dark state: the branch with the smallest decay rate (largest imaginary part).
  std::size_t branch = start[0].value.imag() >= start[1].value.imag() ? 0 : 1;
  const CVector psi0 = start[branch].vector;
  CVector followed = psi0;
  cplx lam_prev = start[branch].value;

  CVector psi = psi0;
  double dyn_phase = 0.0;
  for (int j = 0; j < steps; ++j) {
    const double tm = (j + 0.5) * dt;
    psi = expm(-I * dt * hamiltonian(model, trajectory_point(traj, tm))) * psi;
    const double nrm = psi.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("dark_state_phase: state collapsed");
    psi /= nrm;

    auto now = eig_at((j + 1) * dt);
    const double o0 = std::abs(followed.dot(now[0].vector));
    const double o1 = std::abs(followed.dot(now[1].vector));
    const std::size_t pick = o0 >= o1 ? 0 : 1;
    if (std::max(o0, o1) < 0.5) throw NumericalError("dark_state_phase: branch tracking lost");
    const cplx lam = now[pick].value;
    dyn_phase += 0.5 * (lam_prev + lam).real() * dt;
    lam_prev = lam;
    followed = now[pick].vector;
  }
  // psi carries exp(-i * integral of the followed eigenvalue); remove its phase.
  const cplx overlap = psi0.dot(psi);
  return wrap_angle(std::arg(overlap) + dyn_phase);
}

}  // namespace fmslab
