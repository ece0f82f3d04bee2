#include "fmslab/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Stable roots of a 2x2 characteristic polynomial plus a well-conditioned eigenvector choice.
std::vector<Eigenpair> eig2(const CMatrix& m) {
  const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const cplx p = 0.5 * (a + d);
  const cplx half_diff = 0.5 * (a - d);
  const cplx s = std::sqrt(half_diff * half_diff + b * c);
  cplx big = p + s;
  if (std::abs(p - s) > std::abs(big)) big = p - s;
  const cplx det = a * d - b * c;
  const cplx small = std::abs(big) > 0.0 ? det / big : cplx{0.0, 0.0};

  auto vector_for = [&](cplx lam) {
    CVector u1(2), u2(2);
    u1 << b, lam - a;
    u2 << lam - d, c;
    CVector v = u1.norm() >= u2.norm() ? u1 : u2;
    const double nrm = v.norm();
    if (!(nrm > 0.0)) {
      // Scalar block: any vector is an eigenvector.
      v = CVector::Zero(2);
      v(0) = 1.0;
      return v;
    }
    return CVector(v / nrm);
  };

  std::vector<Eigenpair> out;
  out.push_back({big, vector_for(big)});
  out.push_back({small, vector_for(small)});
  if (std::abs(b) == 0.0 && std::abs(c) == 0.0) {
    // Diagonal input: keep the coordinate axes so distinct eigenvalues get distinct vectors.
    out[0].vector = CVector::Zero(2);
    out[1].vector = CVector::Zero(2);
    const bool big_is_a = std::abs(big - a) <= std::abs(big - d);
    out[0].vector(big_is_a ? 0 : 1) = 1.0;
    out[1].vector(big_is_a ? 1 : 0) = 1.0;
  }
  return out;
}

std::vector<Eigenpair> eig_general(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd dense = m;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense, true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_small: QR iteration did not converge");
  }
  const double scale = std::max(1.0, m.norm());
  std::vector<Eigenpair> out;
  for (int i = 0; i < n; ++i) {
    cplx lam = solver.eigenvalues()(i);
    Eigen::VectorXcd v = solver.eigenvectors().col(i).normalized();
    // Inverse-iteration polish with a tiny shift so the solve stays nonsingular.
    const cplx shift = lam + cplx(1e-14 * scale, 1e-14 * scale);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense - shift * Eigen::MatrixXcd::Identity(n, n));
    double best = (dense * v - lam * v).norm();
    for (int it = 0; it < 3 && best >= 1e-13 * scale; ++it) {
      Eigen::VectorXcd w = lu.solve(v);
      const double wn = w.norm();
      if (!(wn > 0.0) || !std::isfinite(wn)) break;
      w /= wn;
      const double r = (dense * w - lam * w).norm();
      if (r < best) {
        best = r;
        v = w;
      }
    }
    if (!(best < 1e-12 * scale)) {
      std::ostringstream msg;
      msg << "eig_small: eigenvector residual " << best << " above 1e-12 (scaled) after polishing";
      throw NumericalError(msg.str());
    }
    out.push_back({lam, CVector(v)});
  }
  return out;
}

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  cplx value;
  double error;
};

GkEstimate gauss_kronrod(const std::function<cplx(double)>& g, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const cplx fc = g(mid);
  cplx kronrod = kKronrodWeights[7] * fc;
  cplx gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const cplx f1 = g(mid - dx), f2 = g(mid + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

cplx adapt(const std::function<cplx(double)>& g, double a, double b, double eps, int depth) {
  const GkEstimate whole = gauss_kronrod(g, a, b);
  if (!std::isfinite(whole.value.real()) || !std::isfinite(whole.value.imag())) {
    throw NumericalError("integrate_ray: integrand produced a non-finite value");
  }
  // Below the roundoff floor further bisection cannot reduce the estimate.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(whole.value);
  if (whole.error <= std::max(eps, floor) || depth >= 40) return whole.value;
  const double mid = 0.5 * (a + b);
  return adapt(g, a, mid, 0.5 * eps, depth + 1) + adapt(g, mid, b, 0.5 * eps, depth + 1);
}

}  // namespace

void RealSeries::check() const {
  if (x.size() != y.size()) throw NumericalError("RealSeries: x and y lengths differ");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw NumericalError("RealSeries: non-finite value at index " + std::to_string(i));
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw NumericalError("RealSeries: x not strictly increasing at index " + std::to_string(i));
    }
  }
}

cplx Rational::operator()(cplx t) const {
  auto horner = [t](const std::vector<double>& c) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  return horner(num) / horner(den);
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

bool all_finite(const CMatrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

std::vector<Eigenpair> eig_small(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDim) {
    throw NumericalError("eig_small: expected a square matrix with dim <= 8");
  }
  if (!all_finite(m)) throw NumericalError("eig_small: non-finite entries");
  std::vector<Eigenpair> out;
  if (m.rows() == 1) {
    CVector v(1);
    v(0) = 1.0;
    out.push_back({m(0, 0), v});
  } else if (m.rows() == 2) {
    out = eig2(m);
  } else {
    out = eig_general(m);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenpair& l, const Eigenpair& r) { return lex_less(l.value, r.value); });
  return out;
}

cplx discriminant(const CMatrix& m) {
  const cplx diff = m(0, 0) - m(1, 1);
  return diff * diff + 4.0 * m(0, 1) * m(1, 0);
}

CMatrix expm(const CMatrix& m) {
  if (m.rows() != m.cols()) throw NumericalError("expm: matrix not square");
  if (!all_finite(m)) throw NumericalError("expm: non-finite entries");
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 > 700.0) {
    std::ostringstream msg;
    msg << "expm: 1-norm " << norm1 << " would overflow the scaled exponential";
    throw NumericalError(msg.str());
  }
  CMatrix out;
  if (m.rows() == 2) {
    const cplx p = 0.5 * (m(0, 0) + m(1, 1));
    CMatrix b = m;
    b(0, 0) -= p;
    b(1, 1) -= p;
    const cplx s2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
    const cplx s = std::sqrt(s2);
    cplx ch, sh_over_s;
    if (std::abs(s) < 1e-4) {
      ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
      sh_over_s = 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
    } else {
      ch = std::cosh(s);
      sh_over_s = std::sinh(s) / s;
    }
    out = sh_over_s * b;
    out(0, 0) += ch;
    out(1, 1) += ch;
    out *= std::exp(p);
  } else {
    Eigen::MatrixXcd dense = m;
    out = dense.exp();
  }
  if (!all_finite(out)) throw NumericalError("expm: result overflowed");
  return out;
}

FitResult fit_loglog(const RealSeries& s) {
  if (s.size() < 4) throw NumericalError("fit_loglog: need at least 4 points");
  if (s.x.size() != s.y.size()) throw NumericalError("fit_loglog: x and y lengths differ");
  const std::size_t n = s.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
      throw NumericalError("fit_loglog: nonpositive or non-finite data at index " +
                           std::to_string(i));
    }
    lx[i] = std::log(s.x[i]);
    ly[i] = std::log(s.y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("fit_loglog: x values are all equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

std::vector<std::size_t> find_peak_indices(const std::vector<double>& y, double prominence,
                                           bool periodic) {
  std::vector<std::size_t> peaks;
  const std::size_t n = y.size();
  if (n < 3 || !(prominence > 0.0)) return peaks;
  const auto at = [&](std::ptrdiff_t i) {
    return y[static_cast<std::size_t>((i % static_cast<std::ptrdiff_t>(n) + n) % n)];
  };
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
  const std::ptrdiff_t first = periodic ? 0 : 1;
  const std::ptrdiff_t last = periodic ? sn - 1 : sn - 2;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const double h = y[static_cast<std::size_t>(i)];
    if (!(h > at(i - 1) && h >= at(i + 1))) continue;
    // Walk outwards until a higher sample (or the boundary); the lower of the two side minima
    // sets the reference level.
    double left = h, right = h;
    for (std::ptrdiff_t s = 1; s < sn; ++s) {
      if (!periodic && i - s < 0) break;
      const double v = at(i - s);
      if (v > h) break;
      left = std::min(left, v);
    }
    for (std::ptrdiff_t s = 1; s < sn; ++s) {
      if (!periodic && i + s >= sn) break;
      const double v = at(i + s);
      if (v > h) break;
      right = std::min(right, v);
    }
    if (h - std::max(left, right) >= prominence) peaks.push_back(static_cast<std::size_t>(i));
  }
  return peaks;
}

std::vector<double> find_peaks(const RealSeries& s, double prominence, bool periodic) {
  std::vector<double> out;
  for (auto i : find_peak_indices(s.y, prominence, periodic)) out.push_back(s.x[i]);
  return out;
}

namespace {

// Solves the Hankel system for the denominator; returns false if it is rank deficient.
bool pade_exact(const std::vector<double>& c, int m, int n, Rational& out) {
  auto coeff = [&](int k) { return k < 0 ? 0.0 : c[static_cast<std::size_t>(k)]; };
  std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
  q[0] = 1.0;
  if (n > 0) {
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      for (int j = 1; j <= n; ++j) h(r, j - 1) = coeff(m + 1 + r - j);
      rhs(r) = -coeff(m + 1 + r);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);
    for (int j = 1; j <= n; ++j) q[static_cast<std::size_t>(j)] = sol(j - 1);
  }
  std::vector<double> p(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= std::min(k, n); ++j) acc += q[static_cast<std::size_t>(j)] * coeff(k - j);
    p[static_cast<std::size_t>(k)] = acc;
  }
  out.num = std::move(p);
  out.den = std::move(q);
  return true;
}

// Taylor coefficients of num/den up to order `count - 1`.
std::vector<double> expand(const Rational& r, std::size_t count) {
  std::vector<double> t(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    double acc = k < r.num.size() ? r.num[k] : 0.0;
    for (std::size_t j = 1; j <= k && j < r.den.size(); ++j) acc -= r.den[j] * t[k - j];
    t[k] = acc;
  }
  return t;
}

}  // namespace

Rational pade(const std::vector<double>& coeffs, int m, int n) {
  if (m < 0 || n < 0) throw NumericalError("pade: negative degree");
  const std::size_t need = static_cast<std::size_t>(m + n + 1);
  if (coeffs.size() < need) throw NumericalError("pade: need at least m+n+1 coefficients");
  Rational r;
  if (pade_exact(coeffs, m, n, r)) return r;
  // Singular Hankel matrix: the Pade table has a square block here. Walk down the diagonal and
  // accept a smaller approximant only if it still reproduces all m+n+1 coefficients.
  double scale = 0.0;
  for (std::size_t k = 0; k < need; ++k) scale = std::max(scale, std::abs(coeffs[k]));
  for (int d = 1; d <= std::min(m, n); ++d) {
    Rational cand;
    if (!pade_exact(coeffs, m - d, n - d, cand)) continue;
    const auto t = expand(cand, need);
    bool match = true;
    for (std::size_t k = 0; k < need; ++k) {
      if (std::abs(t[k] - coeffs[k]) > 1e-12 * std::max(1.0, scale)) {
        match = false;
        break;
      }
    }
    if (!match) break;
    cand.num.resize(static_cast<std::size_t>(m) + 1, 0.0);
    cand.den.resize(static_cast<std::size_t>(n) + 1, 0.0);
    return cand;
  }
  std::ostringstream msg;
  msg << "pade: singular Hankel system for [" << m << "/" << n << "]; try [" << m - 1 << "/"
      << n - 1 << "]";
  throw NumericalError(msg.str());
}

cplx integrate_ray(const RayIntegrand& f, double angle, double tol) {
  if (!(tol > 0.0)) throw NumericalError("integrate_ray: tolerance must be positive");
  const cplx dir = std::polar(1.0, angle);
  const std::function<cplx(double)> along = [&](double r) { return f(r * dir) * dir; };

  cplx total = 0.0;
  double start = 0.0, length = 1.0;
  double prev_density = -1.0;
  int growth_streak = 0, quiet_streak = 0;
  for (int seg = 0; seg < 64; ++seg) {
    const double end = start + length;
    const cplx rough = gauss_kronrod(along, start, end).value;
    const double eps = 0.1 * tol * std::max(std::abs(total + rough), 1e-300);
    const cplx part = adapt(along, start, end, eps, 0);
    total += part;

    const double density = std::abs(part) / length;
    if (prev_density >= 0.0 && density > prev_density && seg >= 2) {
      if (++growth_streak >= 3) {
        throw NumericalError("integrate_ray: integrand does not decay along the ray");
      }
    } else {
      growth_streak = 0;
    }
    prev_density = density;

    if (std::abs(part) <= 1e-3 * tol * std::abs(total)) {
      if (++quiet_streak >= 2) return total;
    } else {
      quiet_streak = 0;
    }
    start = end;
    length *= 2.0;
  }
  throw NumericalError("integrate_ray: tail did not become negligible");
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count < 1) return out;
  if (count == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count < 1) return out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

}  // namespace fmslab
