#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmslab/floquet.hpp"
#include "fmslab/models.hpp"
#include "fmslab/numerics.hpp"

namespace fmslab {

struct ScalingReport {
  std::string sweep_variable;  // "R", "omega" or "W"
  RealSeries series;
  FitResult fit;
  double expected_exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Static splitting |E_1 - E_2| of H(EP + R e^{i angle}).
ScalingReport static_gap_scaling(const ModelSpec& model, const std::vector<double>& r_grid,
                                 double angle = 0.0);

struct BreakdownParams {
  double metric_scale = 1.0;    // c in g(z) = c |z|^{-2(k+1)}
  double approach_speed = 1.0;  // |dz/dt| on the way in
  double start_distance = 1.0;  // trajectory starts here and runs towards z = 0
};

struct DynamicGapPoint {
  double omega = 0.0;
  double critical_distance = 0.0;  // z_c
  double gap_min = 0.0;            // |z_c|^{k+1} / sqrt(c)
  double pullback_gap = 0.0;       // sqrt(g(z_c)) * omega
};

// Adiabaticity breakdown along a straight approach: DE(z)^2 = |dDE/dt| with DE = sqrt(g) omega.
DynamicGapPoint breakdown_point(int rank, double omega, const BreakdownParams& params = {});

ScalingReport dynamic_gap_scaling(int rank, const std::vector<double>& omega_grid,
                                  const BreakdownParams& params = {},
                                  std::vector<DynamicGapPoint>* points = nullptr);
ScalingReport dynamic_gap_scaling(const ModelSpec& model, const std::vector<double>& omega_grid,
                                  const BreakdownParams& params = {},
                                  std::vector<DynamicGapPoint>* points = nullptr);

struct DisorderPoint {
  double w = 0.0;
  double fms_mean = 0.0, fms_stderr = 0.0;
  double spectral_mean = 0.0, spectral_stderr = 0.0;
  bool all_converged = true;
};

struct DisorderResult {
  std::vector<DisorderPoint> points;
  RealSeries fms_curve() const;
  RealSeries spectral_curve() const;
};

// Fixed-per-trial complex noise matrix with entries uniform on [-1/2, 1/2] + i[-1/2, 1/2].
CMatrix disorder_matrix(std::uint64_t seed, std::uint64_t trial, int dim = 2);

DisorderResult disorder_robustness(const ModelSpec& model, const TrajectorySpec& traj,
                                   const std::vector<double>& w_grid, int trials,
                                   std::uint64_t seed, const PropagateOptions& opts = {},
                                   int workers = 1);

}  // namespace fmslab
