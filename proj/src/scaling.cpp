#include "fmslab/scaling.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

#include "fmslab/error.hpp"
#include "fmslab/parallel.hpp"

namespace fmslab {

namespace {

bool spans_two_decades(const std::vector<double>& grid) {
  double lo = 1e300, hi = 0.0;
  for (double v : grid) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 && hi / lo >= 100.0 * (1.0 - 1e-12);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double splitting(const CMatrix& h) {
  const auto eig = eig_small(h);
  return std::abs(eig[0].value - eig[1].value);
}

}  // namespace

ScalingReport static_gap_scaling(const ModelSpec& model, const std::vector<double>& r_grid,
                                 double angle) {
  ScalingReport rep;
  rep.sweep_variable = "R";
  const cplx ep = ep_location(model).position;
  const cplx dir = std::polar(1.0, angle);
  std::vector<double> grid = r_grid;
  std::sort(grid.begin(), grid.end());
  for (double r : grid) {
    if (!(r > 0.0)) throw NumericalError("static_gap_scaling: R must be > 0");
    rep.series.push_back(r, splitting(hamiltonian(model, ep + r * dir)));
  }
  rep.fit = fit_loglog(rep.series);
  rep.expected_exponent = model.family == Family::RankK ? (model.k + 1) / 2.0 : 0.5;
  rep.tolerance = 0.02;
  rep.pass = std::abs(rep.fit.slope - rep.expected_exponent) <= rep.tolerance;
  return rep;
}

DynamicGapPoint breakdown_point(int rank, double omega, const BreakdownParams& p) {
  if (!(omega > 0.0)) throw NumericalError("breakdown_point: omega must be > 0");
  DynamicGapPoint pt;
  pt.omega = omega;
  const double sc = std::sqrt(p.metric_scale);
  if (rank <= 0) {
    // A simple pole never overtakes the drive rate: there is no breakdown point, and the smallest
    // gap met by the trajectory is the one at its own distance.
    pt.critical_distance = p.start_distance;
    pt.pullback_gap = sc * omega / p.start_distance;
    pt.gap_min = pt.pullback_gap;
    return pt;
  }
  const double order = rank + 1.0;
  const auto gap = [&](double z) { return sc * omega * std::pow(z, -order); };
  const auto rate = [&](double z) {
    return order * sc * omega * std::pow(z, -order - 1.0) * p.approach_speed;
  };
  // Work in u = log z; positive once the gap has shrunk below the rate at which it changes.
  const auto balance = [&](double u) {
    const double z = std::exp(u);
    return 2.0 * std::log(gap(z)) - std::log(rate(z));
  };
  const double u_hi = std::log(p.start_distance);
  if (balance(u_hi) >= 0.0) {
    std::ostringstream msg;
    msg << "dynamic_gap_scaling: no bracket for omega = " << omega
        << ": already non-adiabatic at the start distance " << p.start_distance;
    throw NumericalError(msg.str());
  }
  double u_lo = u_hi - 1.0;
  while (balance(u_lo) <= 0.0) {
    u_lo -= 2.0;
    if (u_lo < -600.0) {
      throw NumericalError("dynamic_gap_scaling: no bracket found down to z = 1e-260");
    }
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      balance, u_lo, u_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double zc = std::exp(0.5 * (root.first + root.second));
  pt.critical_distance = zc;
  pt.pullback_gap = gap(zc);
  pt.gap_min = std::pow(zc, order) / sc;
  return pt;
}

ScalingReport dynamic_gap_scaling(int rank, const std::vector<double>& omega_grid,
                                  const BreakdownParams& params,
                                  std::vector<DynamicGapPoint>* points) {
  if (omega_grid.size() < 4 || !spans_two_decades(omega_grid)) {
    throw NumericalError("dynamic_gap_scaling: omega grid must hold >= 4 points over >= 2 decades");
  }
  std::vector<double> grid = omega_grid;
  std::sort(grid.begin(), grid.end());
  ScalingReport rep;
  rep.sweep_variable = "omega";
  std::vector<DynamicGapPoint> pts;
  for (double w : grid) {
    pts.push_back(breakdown_point(rank, w, params));
    rep.series.push_back(w, pts.back().gap_min);
  }
  rep.fit = fit_loglog(rep.series);
  rep.expected_exponent = rank <= 0 ? 1.0 : 1.0 + 1.0 / rank;
  rep.tolerance = rank <= 0 ? 0.05 : 0.1;
  rep.pass = std::abs(rep.fit.slope - rep.expected_exponent) <= rep.tolerance;
  if (points) *points = std::move(pts);
  return rep;
}

ScalingReport dynamic_gap_scaling(const ModelSpec& model, const std::vector<double>& omega_grid,
                                  const BreakdownParams& params,
                                  std::vector<DynamicGapPoint>* points) {
  return dynamic_gap_scaling(model.rank(), omega_grid, params, points);
}

RealSeries DisorderResult::fms_curve() const {
  RealSeries s;
  for (const auto& p : points) s.push_back(p.w, p.fms_mean);
  return s;
}

RealSeries DisorderResult::spectral_curve() const {
  RealSeries s;
  for (const auto& p : points) s.push_back(p.w, p.spectral_mean);
  return s;
}

CMatrix disorder_matrix(std::uint64_t seed, std::uint64_t trial, int dim) {
  CMatrix g(dim, dim);
  const std::uint64_t key = splitmix64(seed ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  std::uint64_t counter = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = unit_uniform(splitmix64(key + counter++)) - 0.5;
      const double im = unit_uniform(splitmix64(key + counter++)) - 0.5;
      g(i, j) = cplx(re, im);
    }
  }
  return g;
}

DisorderResult disorder_robustness(const ModelSpec& model, const TrajectorySpec& traj,
                                   const std::vector<double>& w_grid, int trials,
                                   std::uint64_t seed, const PropagateOptions& opts, int workers) {
  if (trials < 1) throw NumericalError("disorder_robustness: trials must be >= 1");
  constexpr int kLoopSamples = 64;
  const double period = traj.period();
  const MonodromyResult clean = propagate(model, traj, opts);

  std::vector<double> clean_gap(kLoopSamples);
  for (int s = 0; s < kLoopSamples; ++s) {
    clean_gap[static_cast<std::size_t>(s)] =
        splitting(hamiltonian(model, trajectory_point(traj, period * s / kLoopSamples)));
  }

  const std::size_t nw = w_grid.size();
  const std::size_t nt = static_cast<std::size_t>(trials);
  std::vector<double> fms(nw * nt), spectral(nw * nt);
  std::vector<char> conv(nw * nt, 1);
  parallel_for(nw * nt, workers, [&](std::size_t idx) {
    const std::size_t wi = idx / nt, ti = idx % nt;
    const double w = w_grid[wi];
    const CMatrix noise = w * disorder_matrix(seed, ti);
    const HamiltonianFn h = [&](double t) {
      return CMatrix(hamiltonian(model, trajectory_point(traj, t)) + noise);
    };
    const MonodromyResult noisy = propagate(h, period, traj.steps, opts);
    fms[idx] = monodromy_fidelity(clean.normalized, noisy.normalized);
    conv[idx] = noisy.converged ? 1 : 0;
    double ss = 0.0;
    for (int s = 0; s < kLoopSamples; ++s) {
      const double t = period * s / kLoopSamples;
      const double g0 = clean_gap[static_cast<std::size_t>(s)];
      const double g1 = splitting(h(t));
      const double rel = (g1 - g0) / std::max(g0, 1e-300);
      ss += rel * rel;
    }
    spectral[idx] = std::exp(-std::sqrt(ss / kLoopSamples));
  });

  DisorderResult out;
  for (std::size_t wi = 0; wi < nw; ++wi) {
    const std::vector<double> f(fms.begin() + static_cast<std::ptrdiff_t>(wi * nt),
                                fms.begin() + static_cast<std::ptrdiff_t>((wi + 1) * nt));
    const std::vector<double> s(spectral.begin() + static_cast<std::ptrdiff_t>(wi * nt),
                                spectral.begin() + static_cast<std::ptrdiff_t>((wi + 1) * nt));
    DisorderPoint p;
    p.w = w_grid[wi];
    p.fms_mean = mean_of(f);
    p.fms_stderr = stderr_of(f, p.fms_mean);
    p.spectral_mean = mean_of(s);
    p.spectral_stderr = stderr_of(s, p.spectral_mean);
    for (std::size_t ti = 0; ti < nt; ++ti) p.all_converged = p.all_converged && conv[wi * nt + ti];
    out.points.push_back(p);
  }
  return out;
}

}  // namespace fmslab
