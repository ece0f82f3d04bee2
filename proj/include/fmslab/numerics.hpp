#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace fmslab {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 8;

// Dynamic size with a fixed upper bound: no heap traffic for the small matrices used here.
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

struct Eigenpair {
  cplx value;
  CVector vector;  // unit Euclidean norm
};

struct RealSeries {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  void push_back(double xv, double yv) {
    x.push_back(xv);
    y.push_back(yv);
  }
  // Throws NumericalError when x is not strictly increasing or a value is not finite.
  void check() const;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

struct Rational {
  std::vector<double> num;  // ascending powers
  std::vector<double> den;  // den[0] == 1
  cplx operator()(cplx t) const;
};

CMatrix identity(int n);
bool all_finite(const CMatrix& m);

// Eigenvalues sorted by (re, im); closed form for 2x2, Eigen + inverse iteration otherwise.
std::vector<Eigenpair> eig_small(const CMatrix& m);

// Discriminant (a-d)^2 + 4bc of a 2x2 matrix; zero exactly at a double eigenvalue.
cplx discriminant(const CMatrix& m);

CMatrix expm(const CMatrix& m);

FitResult fit_loglog(const RealSeries& s);

std::vector<double> find_peaks(const RealSeries& s, double prominence, bool periodic = false);
std::vector<std::size_t> find_peak_indices(const std::vector<double>& y, double prominence,
                                           bool periodic = false);

Rational pade(const std::vector<double>& coeffs, int m, int n);

using RayIntegrand = std::function<cplx(cplx)>;
cplx integrate_ray(const RayIntegrand& f, double angle, double tol);

std::vector<double> logspace(double lo, double hi, int count);
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace fmslab
