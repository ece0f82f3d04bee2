#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fmslab/error.hpp"
#include "fmslab/numerics.hpp"
#include "support.hpp"

using namespace fmslab;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("eig_small: symmetric swap has eigenvalues -1, +1 in order") {
  const auto e = eig_small(mat2(0, 1, 1, 0));
  REQUIRE(e.size() == 2);
  CHECK(std::abs(e[0].value - cplx(-1, 0)) < 1e-14);
  CHECK(std::abs(e[1].value - cplx(1, 0)) < 1e-14);
}

TEST_CASE("eig_small: transmon matrix at the exceptional point has a double eigenvalue") {
  const auto e = eig_small(mat2(0, 0.25, 0.25, -0.5 * I));
  CHECK(std::abs(e[0].value - cplx(0, -0.25)) < 1e-12);
  CHECK(std::abs(e[1].value - cplx(0, -0.25)) < 1e-12);
  CHECK(std::abs(e[0].vector.dot(e[1].vector)) > 1.0 - 1e-9);
}

TEST_CASE("eig_small: closed form for the off-diagonal family") {
  const cplx root = std::sqrt(cplx(1.0, 0.1));
  const auto e = eig_small(mat2(0, 1, cplx(1.0, 0.1), 0));
  CHECK(std::abs(e[0].value + root) < 1e-14);
  CHECK(std::abs(e[1].value - root) < 1e-14);
}

TEST_CASE("eig_small: residuals and unit norm on random 2x2 and 4x4 matrices") {
  std::mt19937_64 rng(11);
  for (int n : {2, 4}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const CMatrix m = test::random_matrix(rng, n);
      const auto e = eig_small(m);
      REQUIRE(e.size() == static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK((m * e[i].vector - e[i].value * e[i].vector).norm() < 1e-10);
        CHECK(std::abs(e[i].vector.norm() - 1.0) < 1e-12);
        if (i > 0) {
          const cplx a = e[i - 1].value, b = e[i].value;
          CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
        }
      }
    }
  }
}

TEST_CASE("discriminant vanishes exactly at a double eigenvalue") {
  CHECK(std::abs(discriminant(mat2(0, 0.25, 0.25, -0.5 * I))) < 1e-15);
  CHECK(std::abs(discriminant(mat2(1, 0, 0, -1)) - 4.0) < 1e-15);
}

TEST_CASE("expm: identities") {
  CHECK((expm(CMatrix::Zero(3, 3)) - identity(3)).norm() < 1e-15);
  const CMatrix d = expm(mat2(cplx(0.3, 1.0), 0, 0, cplx(-2.0, 0.5)));
  CHECK(std::abs(d(0, 0) - std::exp(cplx(0.3, 1.0))) < 1e-14);
  CHECK(std::abs(d(1, 1) - std::exp(cplx(-2.0, 0.5))) < 1e-14);
  CHECK(std::abs(d(0, 1)) < 1e-15);
  const CMatrix rot = expm(-I * (kPi / 2.0) * mat2(0, 1, 1, 0));
  CHECK((rot - mat2(0, -I, -I, 0)).norm() < 1e-14);
}

TEST_CASE("expm: matches an independent Taylor oracle and det = exp(trace)") {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      const CMatrix m = test::random_matrix(rng, n, n == 2 ? 2.0 : 1.0);
      const CMatrix e = expm(m);
      const CMatrix ref = test::taylor_expm(m);
      CHECK((e - ref).norm() <= 1e-12 * ref.norm());
      const cplx det = Eigen::MatrixXcd(e).determinant();
      CHECK(std::abs(det - std::exp(m.trace())) <= 1e-10 * std::abs(det));
    }
  }
}

TEST_CASE("expm: nilpotent and near-degenerate 2x2 inputs") {
  const CMatrix jordan = mat2(0, 1, 0, 0);
  CHECK((expm(jordan) - mat2(1, 1, 0, 1)).norm() < 1e-15);
  const CMatrix near = mat2(0, 1, cplx(1e-12, 1e-12), 0);
  CHECK((expm(near) - test::taylor_expm(near)).norm() < 1e-14);
}

TEST_CASE("expm: overflow is reported") {
  CHECK_THROWS_AS(expm(mat2(1000, 0, 0, 0)), NumericalError);
}

TEST_CASE("trace cyclicity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = test::random_matrix(rng, 4), b = test::random_matrix(rng, 4);
    CHECK(std::abs((a * b).trace() - (b * a).trace()) < 1e-12);
  }
}

TEST_CASE("fit_loglog recovers exact power laws") {
  RealSeries sq;
  for (double x : {1.0, 2.0, 4.0, 8.0}) sq.push_back(x, x * x);
  CHECK(std::abs(fit_loglog(sq).slope - 2.0) < 1e-12);
  RealSeries root;
  for (double x : logspace(1e-3, 1e2, 11)) root.push_back(x, 3.0 * std::sqrt(x));
  const FitResult f = fit_loglog(root);
  CHECK(std::abs(f.slope - 0.5) < 1e-10);
  CHECK(std::abs(f.intercept - std::log(3.0)) < 1e-10);
  CHECK(f.residual_rms >= 0.0);
  CHECK(f.residual_rms < 1e-12);
}

TEST_CASE("fit_loglog rejects bad input") {
  RealSeries few;
  for (double x : {1.0, 2.0, 3.0}) few.push_back(x, x);
  CHECK_THROWS_AS(fit_loglog(few), NumericalError);
  RealSeries neg;
  for (double x : {1.0, 2.0, 3.0, 4.0}) neg.push_back(x, x - 2.0);
  CHECK_THROWS_AS(fit_loglog(neg), NumericalError);
}

TEST_CASE("find_peaks") {
  RealSeries flat;
  for (int i = 0; i < 50; ++i) flat.push_back(i, 1.0);
  CHECK(find_peaks(flat, 0.1).empty());

  const auto th = linspace(0.0, 2.0 * kPi * (1.0 - 1.0 / 256), 256);
  RealSeries wave;
  for (double t : th) wave.push_back(t, std::sin(3.0 * t));
  const auto peaks = find_peaks(wave, 0.5, true);
  REQUIRE(peaks.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(peaks[i] - (kPi / 6.0 + 2.0 * kPi * static_cast<double>(i) / 3.0)) < 0.03);
  }
  // A peak sitting on the wrap point is found only on the periodic domain.
  RealSeries cosine;
  for (double t : th) cosine.push_back(t, std::cos(t));
  CHECK(find_peaks(cosine, 0.5, false).empty());
  CHECK(find_peaks(cosine, 0.5, true).size() == 1);
}

TEST_CASE("pade: simple cases") {
  const Rational geo = pade({1.0, 1.0, 1.0, 1.0}, 1, 1);
  REQUIRE(geo.num.size() >= 1);
  CHECK(std::abs(geo.num[0] - 1.0) < 1e-14);
  CHECK(std::abs(geo.den[0] - 1.0) < 1e-14);
  CHECK(std::abs(geo.den[1] + 1.0) < 1e-14);
  const Rational one = pade({1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 3, 3);
  for (double t : {0.0, 0.5, -2.0, 10.0}) CHECK(std::abs(one(t) - 1.0) < 1e-12);
}

TEST_CASE("pade: alternating geometric series resums to 1/(1+t)") {
  std::vector<double> c(9);
  for (int n = 0; n < 9; ++n) c[static_cast<std::size_t>(n)] = n % 2 == 0 ? 1.0 : -1.0;
  const Rational r = pade(c, 4, 4);
  for (cplx t : {cplx(0.3, 0), cplx(5, 0), cplx(20, 1)}) {
    CHECK(std::abs(r(t) - 1.0 / (1.0 + t)) < 1e-12 * std::abs(1.0 / (1.0 + t)));
  }
}

TEST_CASE("pade reproduces the input Taylor coefficients") {
  // exp(x): a generic Hankel system.
  std::vector<double> c(9);
  double f = 1.0;
  for (int n = 0; n < 9; ++n) {
    if (n > 0) f *= n;
    c[static_cast<std::size_t>(n)] = 1.0 / f;
  }
  for (auto [m, n] : {std::pair{2, 2}, std::pair{4, 4}, std::pair{3, 5}}) {
    const Rational r = pade(c, m, n);
    // Re-expand P/Q by long division.
    std::vector<double> e(static_cast<std::size_t>(m + n + 1), 0.0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      double v = k < r.num.size() ? r.num[k] : 0.0;
      for (std::size_t j = 1; j <= k && j < r.den.size(); ++j) v -= r.den[j] * e[k - j];
      e[k] = v;
    }
    for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(e[k] - c[k]) <= 1e-9 * std::abs(c[k]));
  }
}

TEST_CASE("integrate_ray") {
  const auto expo = [](cplx t) { return std::exp(-t); };
  CHECK(std::abs(integrate_ray(expo, 0.0, 1e-12) - 1.0) < 1e-11);
  CHECK(std::abs(integrate_ray([](cplx t) { return t * std::exp(-t); }, 0.0, 1e-12) - 1.0) < 1e-11);
  // Independent oracle: composite Simpson on [0, 80] with 2^18 panels.
  const auto g = [](double t) { return std::exp(-t) / (1.0 + 0.1 * t); };
  const int panels = 1 << 18;
  const double h = 80.0 / panels;
  double simpson = g(0.0) + g(80.0);
  for (int i = 1; i < panels; ++i) simpson += (i % 2 ? 4.0 : 2.0) * g(i * h);
  simpson *= h / 3.0;
  const cplx val = integrate_ray([](cplx t) { return std::exp(-t) / (1.0 + 0.1 * t); }, 0.0, 1e-13);
  CHECK(std::abs(val - simpson) < 1e-12);
  CHECK(std::abs(val.real() - 0.91563333939788) < 1e-12);
  // Rotated ray: the integral of e^{-t} is path independent.
  CHECK(std::abs(integrate_ray(expo, 0.3, 1e-12) - 1.0) < 1e-11);
}

TEST_CASE("integrate_ray detects a growing tail") {
  CHECK_THROWS_AS(integrate_ray([](cplx t) { return std::exp(0.1 * t); }, 0.0, 1e-10), NumericalError);
}

TEST_CASE("grids") {
  const auto l = logspace(1e-3, 1e-1, 3);
  CHECK(std::abs(l[1] - 1e-2) < 1e-16);
  const auto s = linspace(0.0, 1.0, 5);
  CHECK(s.size() == 5);
  CHECK(s[4] == 1.0);
}
