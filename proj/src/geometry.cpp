#include "fmslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Eigenvector at `lambda` on the branch that best overlaps `reference`.
CVector follow_branch(const FamilyFn& family, cplx lambda, const CVector& reference) {
  const auto eig = eig_small(family(lambda));
  std::size_t best = 0;
  double best_ov = -1.0;
  for (std::size_t i = 0; i < eig.size(); ++i) {
    const double ov = std::abs(reference.dot(eig[i].vector));
    if (ov > best_ov) {
      best_ov = ov;
      best = i;
    }
  }
  return eig[best].vector;
}

CMatrix projector(const CVector& v) { return v * v.adjoint() / v.squaredNorm(); }

void require_split(const FamilyFn& family, cplx lambda, const char* who) {
  const CMatrix m = family(lambda);
  const auto eig = eig_small(m);
  const double scale = std::max(1.0, m.norm());
  for (std::size_t i = 0; i + 1 < eig.size(); ++i) {
    for (std::size_t j = i + 1; j < eig.size(); ++j) {
      if (std::abs(eig[i].value - eig[j].value) < 1e-9 * scale) {
        throw NumericalError(std::string(who) + ": singular stencil (degenerate spectrum)");
      }
    }
  }
}

std::array<cplx, 3> qgt_components(const FamilyFn& family, cplx lambda, double h,
                                   const CVector& center) {
  const cplx steps[2] = {cplx(h, 0.0), cplx(0.0, h)};
  CMatrix dp[2];
  for (int mu = 0; mu < 2; ++mu) {
    const CMatrix plus = projector(follow_branch(family, lambda + steps[mu], center));
    const CMatrix minus = projector(follow_branch(family, lambda - steps[mu], center));
    dp[mu] = (plus - minus) / (2.0 * h);
  }
  const CMatrix p = projector(center);
  return {(p * dp[0] * dp[0]).trace(), (p * dp[0] * dp[1]).trace(), (p * dp[1] * dp[1]).trace()};
}

// Right eigenvectors with columns matched and phase-aligned to `reference`.
CMatrix aligned_basis(const FamilyFn& family, cplx lambda, const CMatrix& reference) {
  const auto eig = eig_small(family(lambda));
  const int n = static_cast<int>(reference.cols());
  CMatrix basis(n, n);
  std::vector<bool> used(eig.size(), false);
  for (int c = 0; c < n; ++c) {
    std::size_t best = 0;
    double best_ov = -1.0;
    for (std::size_t i = 0; i < eig.size(); ++i) {
      if (used[i]) continue;
      const double ov = std::abs(reference.col(c).dot(eig[i].vector));
      if (ov > best_ov) {
        best_ov = ov;
        best = i;
      }
    }
    used[best] = true;
    CVector v = eig[best].vector;
    const cplx ov = reference.col(c).dot(v);
    if (std::abs(ov) > 0.0) v *= std::conj(ov) / std::abs(ov);
    basis.col(c) = v;
  }
  return basis;
}

CMatrix connection_raw(const FamilyFn& family, cplx lambda, double h, int mu,
                       const CMatrix& right) {
  const cplx step = mu == 0 ? cplx(h, 0.0) : cplx(0.0, h);
  const CMatrix plus = aligned_basis(family, lambda + step, right);
  const CMatrix minus = aligned_basis(family, lambda - step, right);
  const CMatrix left = right.inverse();
  return left * (plus - minus) / (2.0 * h);
}

}  // namespace

double QgtValue::metric_along(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * c * g_xx + 2.0 * c * s * g_xy + s * s * g_yy;
}

QgtValue qgt(const FamilyFn& family, cplx lambda, double h, int band) {
  if (!(h > 0.0)) throw NumericalError("qgt: step must be positive");
  for (const cplx off : {cplx(0, 0), cplx(h, 0), cplx(-h, 0), cplx(0, h), cplx(0, -h)}) {
    require_split(family, lambda + off, "qgt");
  }
  const auto eig = eig_small(family(lambda));
  if (band < 0 || band >= static_cast<int>(eig.size())) throw NumericalError("qgt: band out of range");
  const CVector center = eig[static_cast<std::size_t>(band)].vector;
  const auto coarse = qgt_components(family, lambda, h, center);
  const auto fine = qgt_components(family, lambda, h / 2.0, center);
  std::array<cplx, 3> q;
  for (int i = 0; i < 3; ++i) q[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  QgtValue v;
  v.g_xx = q[0].real();
  v.g_xy = q[1].real();
  v.g_yy = q[2].real();
  v.mixing = q[1];
  v.curvature = -2.0 * q[1].imag();
  return v;
}

QgtValue qgt(const ModelSpec& model, cplx lambda, double h, int band) {
  if (std::abs(lambda - ep_location(model).position) <= h) {
    throw NumericalError("qgt: singular stencil (exceptional point within h)");
  }
  return qgt([&](cplx l) { return hamiltonian(model, l); }, lambda, h, band);
}

FitResult metric_divergence_exponent(const ModelSpec& model, const std::vector<double>& d_grid,
                                     double angle, RealSeries* series) {
  const cplx ep = ep_location(model).position;
  const cplx dir = std::polar(1.0, angle);
  RealSeries s;
  std::vector<double> d = d_grid;
  std::sort(d.begin(), d.end());
  for (double dist : d) {
    if (!(dist > 0.0)) throw NumericalError("metric_divergence_exponent: distances must be > 0");
    const QgtValue q = qgt(model, ep + dist * dir, 1e-4 * dist);
    s.push_back(dist, q.metric_along(angle));
  }
  if (series) *series = s;
  return fit_loglog(s);
}

CMatrix connection_matrix(const FamilyFn& family, cplx lambda, double h, int mu) {
  if (mu != 0 && mu != 1) throw NumericalError("connection_matrix: mu must be 0 or 1");
  if (!(h > 0.0)) throw NumericalError("connection_matrix: step must be positive");
  const cplx step = mu == 0 ? cplx(h, 0.0) : cplx(0.0, h);
  for (const cplx off : {cplx(0, 0), step, -step}) {
    require_split(family, lambda + off, "connection_matrix");
  }
  const auto eig = eig_small(family(lambda));
  const int n = static_cast<int>(eig.size());
  CMatrix right(n, n);
  for (int c = 0; c < n; ++c) right.col(c) = eig[static_cast<std::size_t>(c)].vector;
  const CMatrix coarse = connection_raw(family, lambda, h, mu, right);
  const CMatrix fine = connection_raw(family, lambda, h / 2.0, mu, right);
  return (4.0 * fine - coarse) / 3.0;
}

CMatrix connection_matrix(const ModelSpec& model, cplx lambda, double h, int mu) {
  return connection_matrix([&](cplx l) { return hamiltonian(model, l); }, lambda, h, mu);
}

cplx f_mix(const CMatrix& a_i, const CMatrix& s, const CMatrix& a_j) {
  if (a_i.rows() != s.rows() || a_j.rows() != s.rows()) throw NumericalError("f_mix: dimension mismatch");
  const Eigen::MatrixXcd s_dense = s;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(s_dense);
  if (!lu.isInvertible()) throw NumericalError("f_mix: singular S");
  const Eigen::MatrixXcd s_inv = lu.inverse();
  return (Eigen::MatrixXcd(a_i) * s_inv * Eigen::MatrixXcd(a_j)).trace();
}

SaitoScan saito_scan(const ModelSpec& model, const TrajectorySpec& traj, int n_theta) {
  if (traj.kind != TrajectoryKind::Loop) throw NumericalError("saito_scan: needs a loop trajectory");
  const int n = n_theta > 0 ? n_theta : traj.steps;
  if (n < 16) throw NumericalError("saito_scan: theta grid too coarse");
  const int sub = std::max(1, traj.steps / n);
  const double period = traj.period();
  const double dt_grid = period / n;
  const double dt = dt_grid / sub;

  auto basis_at = [&](double t) {
    const auto eig = eig_small(hamiltonian(model, trajectory_point(traj, t)));
    CMatrix b(2, 2);
    b.col(0) = eig[0].vector;
    b.col(1) = eig[1].vector;
    return std::pair{b, std::array<cplx, 2>{eig[0].value, eig[1].value}};
  };

  auto [basis, values] = basis_at(0.0);
  // Occupy the least-damped branch; column 0 always carries the occupied branch afterwards.
  if (values[1].imag() > values[0].imag()) {
    basis.col(0).swap(basis.col(1));
  }
  CVector psi = basis.col(0);

  SaitoScan scan;
  for (int j = 0; j < n; ++j) {
    const double t = j * dt_grid;
    if (j > 0) {
      CMatrix now = basis_at(t).first;
      const double keep = std::abs(basis.col(0).dot(now.col(0))) + std::abs(basis.col(1).dot(now.col(1)));
      const double swap = std::abs(basis.col(0).dot(now.col(1))) + std::abs(basis.col(1).dot(now.col(0)));
      if (swap > keep) now.col(0).swap(now.col(1));
      if (std::max(keep, swap) < 1.0) throw NumericalError("saito_scan: branch tracking failed");
      for (int c = 0; c < 2; ++c) {
        const cplx ph = basis.col(c).dot(now.col(c));
        if (std::abs(ph) > 0.0) now.col(c) *= std::conj(ph) / std::abs(ph);
      }
      basis = now;
    }
    const CVector coeff = basis.partialPivLu().solve(psi);
    const double occ = std::abs(coeff(0)), other = std::abs(coeff(1));
    const double denom = std::hypot(occ, other);
    scan.theta_grid.push_back(traj.omega * t);
    scan.amplitude.push_back(denom > 0.0 ? other / denom : 0.0);

    for (int s = 0; s < sub; ++s) {
      const double tm = t + (s + 0.5) * dt;
      psi = expm(-I * dt * hamiltonian(model, trajectory_point(traj, tm))) * psi;
      const double nrm = psi.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("saito_scan: state collapsed");
      psi /= nrm;
    }
  }

  const auto& a = scan.amplitude;
  const double dth = kTwoPi / n;
  std::vector<double> deriv(static_cast<std::size_t>(n));
  // One-sided at the ends: the branches swap after a full loop, so the amplitude is not periodic.
  deriv[0] = std::abs(a[1] - a[0]) / dth;
  deriv[static_cast<std::size_t>(n - 1)] = std::abs(a[static_cast<std::size_t>(n - 1)] - a[static_cast<std::size_t>(n - 2)]) / dth;
  for (int j = 1; j + 1 < n; ++j) {
    deriv[static_cast<std::size_t>(j)] =
        std::abs(a[static_cast<std::size_t>(j + 1)] - a[static_cast<std::size_t>(j - 1)]) / (2.0 * dth);
  }
  scan.signal.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto at = [&](int i) { return deriv[static_cast<std::size_t>((i + n) % n)]; };
    scan.signal[static_cast<std::size_t>(j)] = (at(j - 1) + at(j) + at(j + 1)) / 3.0;
  }
  const double peak = *std::max_element(scan.signal.begin(), scan.signal.end());
  if (peak > 0.0) {
    for (auto i : find_peak_indices(scan.signal, 0.25 * peak, true)) {
      scan.peak_locations.push_back(scan.theta_grid[i]);
    }
  }
  scan.peak_count = static_cast<int>(scan.peak_locations.size());
  return scan;
}

double min_gap(const ModelSpec& model, const TrajectorySpec& traj, int samples) {
  double best = 1e300;
  const double period = traj.period();
  for (int j = 0; j <= samples; ++j) {
    const auto eig = eig_small(hamiltonian(model, trajectory_point(traj, period * j / samples)));
    best = std::min(best, std::abs(eig[0].value - eig[1].value));
  }
  return best;
}

PhantomScan phantom_scan(const ModelSpec& model, const TrajectorySpec& sweep,
                         const std::vector<double>& theta_grid, const PropagateOptions& opts) {
  if (model.family != Family::RankK || model.delta == 0.0) {
    throw NumericalError("phantom_scan: needs a RankK model with nonzero delta");
  }
  PhantomScan out;
  for (double theta : theta_grid) {
    ModelSpec m = model;
    m.offset_phase = theta;
    const MonodromyResult r = propagate(m, sweep, opts);
    out.stokes.push_back(theta, r.stokes_invariant);
    out.gap.push_back(theta, min_gap(m, sweep, sweep.steps));
    out.converged.push_back(r.converged);
  }
  return out;
}

}  // namespace fmslab
