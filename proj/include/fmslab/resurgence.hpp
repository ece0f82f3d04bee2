#pragma once

#include <vector>

#include "fmslab/models.hpp"
#include "fmslab/numerics.hpp"

namespace fmslab {

struct AsymptoticSeries {
  std::vector<double> coeffs;
  int gevrey_order = 1;
};

// c_n = sign^n n!; sign = -1 gives the Euler series of int_0^inf e^{-t} / (1 + lambda t) dt.
AsymptoticSeries euler_series(int n_max, int sign = -1);

struct Truncation {
  double value = 0.0;  // partial sum through order - 1
  int order = 0;       // index of the smallest term
};

Truncation optimal_truncation(const AsymptoticSeries& s, double lambda);
double partial_sum(const AsymptoticSeries& s, double lambda, int terms);

struct LateralOptions {
  int pade_order = 0;     // 0: floor(N / 2)
  double ray_angle = 0.05;
  double tolerance = 1e-13;
};

cplx borel_lateral(const AsymptoticSeries& s, double lambda, int side,
                   const LateralOptions& opts = {});

double resurgent_correct(cplx lateral, int side, double sigma, double action, double lambda,
                         double inst_prefactor);

struct TransSeriesData {
  double action = 1.0;
  double sigma = 0.0;
  double inst_prefactor = 1.0;  // multiplies e^{-A/lambda}; a constant term is the default
  bool prefactor_over_lambda = false;
};

struct ResummationReport {
  double lambda = 0.0;
  RealSeries naive_partial_sums;
  double optimal_truncation_value = 0.0;
  int optimal_order = 0;
  cplx lateral_plus = 0.0;
  cplx lateral_minus = 0.0;
  double ambiguity = 0.0;
  double action = 0.0;
  double stokes_constant = 0.0;
  double corrected_value = 0.0;
  double oracle_value = 0.0;
  double abs_error = 0.0;
};

ResummationReport resum(const AsymptoticSeries& s, double lambda, const TransSeriesData& ts,
                        double oracle, const LateralOptions& opts = {});

// Exact values of the Euler test family: sign -1 is the convergent Stieltjes integral, sign +1
// the principal value of its sign-flipped partner.
double euler_reference(double lambda, int sign);

double action_integral(const ModelSpec& model, const TrajectorySpec& traj, int samples = 0);

}  // namespace fmslab
