#include "fmslab/resurgence.hpp"

#include <unsupported/Eigen/Polynomials>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {
constexpr cplx I{0.0, 1.0};
}

AsymptoticSeries euler_series(int n_max, int sign) {
  if (n_max < 20) throw NumericalError("euler_series: n_max must be >= 20");
  if (n_max > 170) throw NumericalError("euler_series: n_max above 170 overflows n!");
  AsymptoticSeries s;
  double fact = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) fact *= n;
    s.coeffs.push_back((sign < 0 && n % 2 == 1) ? -fact : fact);
  }
  return s;
}

double partial_sum(const AsymptoticSeries& s, double lambda, int terms) {
  double acc = 0.0, pw = 1.0;
  for (int n = 0; n < terms && n < static_cast<int>(s.coeffs.size()); ++n) {
    acc += s.coeffs[static_cast<std::size_t>(n)] * pw;
    pw *= lambda;
  }
  return acc;
}

Truncation optimal_truncation(const AsymptoticSeries& s, double lambda) {
  if (!(lambda > 0.0)) throw NumericalError("optimal_truncation: lambda must be > 0");
  const int count = static_cast<int>(s.coeffs.size());
  // Follow the terms while they do not grow; equal neighbours count as still decreasing.
  int order = 0;
  double pw = 1.0, prev = std::abs(s.coeffs[0]);
  for (int n = 1; n < count; ++n) {
    pw *= lambda;
    const double term = std::abs(s.coeffs[static_cast<std::size_t>(n)]) * pw;
    if (term > prev * (1.0 + 1e-12)) break;
    order = n;
    prev = term;
  }
  return {partial_sum(s, lambda, order), order};
}

cplx borel_lateral(const AsymptoticSeries& s, double lambda, int side, const LateralOptions& opts) {
  if (!(lambda > 0.0)) throw NumericalError("borel_lateral: lambda must be > 0");
  if (side != 1 && side != -1) throw NumericalError("borel_lateral: side must be +1 or -1");
  const int count = static_cast<int>(s.coeffs.size());
  const int order = opts.pade_order > 0 ? opts.pade_order : (count - 1) / 2;
  if (2 * order + 1 > count) throw NumericalError("borel_lateral: not enough coefficients for Pade order");

  std::vector<double> borel(static_cast<std::size_t>(2 * order + 1));
  for (int n = 0; n <= 2 * order; ++n) {
    borel[static_cast<std::size_t>(n)] = s.coeffs[static_cast<std::size_t>(n)] / std::tgamma(n + 1.0);
  }
  Rational approx = pade(borel, order, order);

  // Reject Pade poles on the integration ray.
  std::vector<double> den = approx.den;
  while (den.size() > 1 && den.back() == 0.0) den.pop_back();
  const double angle = side * opts.ray_angle;
  if (den.size() > 1) {
    Eigen::VectorXd poly(static_cast<Eigen::Index>(den.size()));
    for (std::size_t i = 0; i < den.size(); ++i) poly(static_cast<Eigen::Index>(i)) = den[i];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(poly);
    const cplx dir = std::polar(1.0, angle);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
      const cplx root = solver.roots()(i);
      const double along = (root * std::conj(dir)).real();
      const double dist = along <= 0.0 ? std::abs(root) : std::abs((root * std::conj(dir)).imag());
      if (dist < 1e-6) {
        std::ostringstream msg;
        msg << "borel_lateral: Pade pole at " << root << " lies on the ray; use a larger angle";
        throw NumericalError(msg.str());
      }
    }
  }
  // Integrate in u = t / lambda so the exponential decays on a unit scale.
  const auto integrand = [&](cplx u) { return std::exp(-u) * approx(lambda * u); };
  return integrate_ray(integrand, angle, opts.tolerance);
}

double resurgent_correct(cplx lateral, int side, double sigma, double action, double lambda,
                         double inst_prefactor) {
  if (!(action > 0.0)) throw NumericalError("resurgent_correct: action must be > 0");
  const cplx combined =
      lateral - static_cast<double>(side) * I * sigma * std::exp(-action / lambda) * inst_prefactor;
  if (std::abs(combined.imag()) >= 1e-8 * std::max(std::abs(lateral), 1e-300)) {
    std::ostringstream msg;
    msg << "resurgent_correct: residual imaginary part " << combined.imag()
        << ": sigma or A inconsistent";
    throw NumericalError(msg.str());
  }
  return combined.real();
}

ResummationReport resum(const AsymptoticSeries& s, double lambda, const TransSeriesData& ts,
                        double oracle, const LateralOptions& opts) {
  ResummationReport rep;
  rep.lambda = lambda;
  for (int n = 1; n <= static_cast<int>(s.coeffs.size()); ++n) {
    rep.naive_partial_sums.push_back(n, partial_sum(s, lambda, n));
  }
  const Truncation tr = optimal_truncation(s, lambda);
  rep.optimal_truncation_value = tr.value;
  rep.optimal_order = tr.order;
  rep.lateral_plus = borel_lateral(s, lambda, +1, opts);
  rep.lateral_minus = borel_lateral(s, lambda, -1, opts);
  rep.ambiguity = 2.0 * std::abs(rep.lateral_plus.imag());
  rep.action = ts.action;
  rep.stokes_constant = ts.sigma;
  const double pref = ts.prefactor_over_lambda ? ts.inst_prefactor / lambda : ts.inst_prefactor;
  rep.corrected_value = resurgent_correct(rep.lateral_plus, +1, ts.sigma, ts.action, lambda, pref);
  rep.oracle_value = oracle;
  rep.abs_error = std::abs(rep.corrected_value - oracle);
  return rep;
}

double euler_reference(double lambda, int sign) {
  if (!(lambda > 0.0)) throw NumericalError("euler_reference: lambda must be > 0");
  const double x = 1.0 / lambda;
  if (sign < 0) {
    // int_0^inf e^{-t}/(1 + lambda t) dt = x e^x E_1(x), with E_1(x) = -Ei(-x).
    return -x * std::exp(x) * std::expint(-x);
  }
  // PV int_0^inf e^{-t}/(1 - lambda t) dt = x e^{-x} Ei(x).
  return x * std::exp(-x) * std::expint(x);
}

double action_integral(const ModelSpec& model, const TrajectorySpec& traj, int samples) {
  if (traj.kind != TrajectoryKind::Loop) throw NumericalError("action_integral: needs a closed loop");
  const int n = samples > 0 ? samples : traj.steps;
  const double period = traj.period();
  const double dt = period / n;
  auto root_at = [&](double t) {
    // det(H - E) with E the mean eigenvalue equals -disc/4.
    return std::sqrt(-0.25 * discriminant(hamiltonian(model, trajectory_point(traj, t))));
  };
  cplx prev = root_at(0.0);
  cplx total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double t = j * dt;
    cplx w = root_at(t);
    if (std::abs(w + prev) < std::abs(w - prev)) w = -w;
    const double scale = std::max(std::abs(w), std::abs(prev));
    if (scale > 1e-12 && std::abs(w - prev) > 0.5 * scale) {
      throw NumericalError("action_integral: branch tracking failed; refine the loop sampling");
    }
    const cplx mid_velocity = trajectory_velocity(traj, t - 0.5 * dt);
    total += 0.5 * (w + prev) * mid_velocity * dt;
    prev = w;
  }
  return std::abs(total.imag());
}

}  // namespace fmslab
