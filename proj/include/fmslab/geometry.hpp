#pragma once

#include <functional>
#include <vector>

#include "fmslab/floquet.hpp"
#include "fmslab/models.hpp"
#include "fmslab/numerics.hpp"

namespace fmslab {

// Any parameter family lambda -> H(lambda); lambda = x + i y spans the two real directions.
using FamilyFn = std::function<CMatrix(cplx)>;

struct QgtValue {
  double g_xx = 0.0, g_xy = 0.0, g_yy = 0.0;  // metric, per unit parameter^2
  double curvature = 0.0;                     // -2 Im Q_xy
  cplx mixing = 0.0;                          // Q_xy

  double metric_along(double angle) const;
};

QgtValue qgt(const FamilyFn& family, cplx lambda, double h, int band = 0);
QgtValue qgt(const ModelSpec& model, cplx lambda, double h, int band = 0);

// Slope of log g vs log d along lambda = EP + d e^{i angle}; step h = 1e-4 d at each point.
FitResult metric_divergence_exponent(const ModelSpec& model, const std::vector<double>& d_grid,
                                     double angle = 0.0, RealSeries* series = nullptr);

// (A_mu)_{mn} = <left_m | d_mu right_n>, mu = 0 for re(lambda), 1 for im(lambda).
CMatrix connection_matrix(const FamilyFn& family, cplx lambda, double h, int mu);
CMatrix connection_matrix(const ModelSpec& model, cplx lambda, double h, int mu);

cplx f_mix(const CMatrix& a_i, const CMatrix& s, const CMatrix& a_j);

struct SaitoScan {
  std::vector<double> theta_grid;
  std::vector<double> amplitude;  // non-adiabatic fraction on the initially empty branch
  std::vector<double> signal;
  std::vector<double> peak_locations;
  int peak_count = 0;
};

// The loop is sampled at `n_theta` equally spaced phases omega*t in [0, 2 pi); 0 means traj.steps.
SaitoScan saito_scan(const ModelSpec& model, const TrajectorySpec& traj, int n_theta = 0);

struct PhantomScan {
  RealSeries stokes;  // S(theta)
  RealSeries gap;     // min_t |E_1 - E_2| along the sweep
  std::vector<bool> converged;
};

PhantomScan phantom_scan(const ModelSpec& model, const TrajectorySpec& sweep,
                         const std::vector<double>& theta_grid, const PropagateOptions& opts = {});

// Minimum instantaneous eigenvalue splitting over `samples` points of the trajectory.
double min_gap(const ModelSpec& model, const TrajectorySpec& traj, int samples);

}  // namespace fmslab
