#pragma once

#include <functional>
#include <vector>

#include "fmslab/models.hpp"
#include "fmslab/numerics.hpp"

namespace fmslab {

// H(t) sampled by the integrator.
using HamiltonianFn = std::function<CMatrix(double)>;

// U(t1, t0) kept as unit * exp(log_scale) so lossy or amplifying runs cannot under/overflow.
// det U = exp(-i * trace_integral) holds exactly for the exponential product.
struct Evolution {
  CMatrix unit;
  double log_scale = 0.0;
  cplx trace_integral = 0.0;
  int steps = 0;

  CMatrix matrix() const;
};

Evolution evolve(const HamiltonianFn& h, double t0, double t1, int steps);

struct PropagateOptions {
  double tolerance = 1e-8;  // on ||U_N - U_2N|| / ||U_2N||
  int max_steps = 1 << 16;
  bool require_convergence = true;
};

struct MonodromyResult {
  CMatrix monodromy;
  CMatrix normalized;
  std::vector<cplx> quasienergies;
  CMatrix unipotent;
  double stokes_invariant = 0.0;
  bool converged = false;
  int step_count_used = 0;
  double period = 0.0;
  double relative_change = 0.0;  // last step-doubling difference
  Evolution evolution;
};

MonodromyResult propagate(const ModelSpec& model, const TrajectorySpec& traj,
                          const PropagateOptions& opts = {});
MonodromyResult propagate(const HamiltonianFn& h, double period, int steps,
                          const PropagateOptions& opts = {});

std::vector<cplx> quasienergies(const CMatrix& m, double period);
// Smallest distance between the real parts of two quasienergies on the circle of length omega.
double quasienergy_splitting(const std::vector<cplx>& eps, double period);

CMatrix normalize(const CMatrix& m);
CMatrix unipotent_part(const CMatrix& normalized, double tol = 1e-6);
double stokes_invariant(const MonodromyResult& result);
double monodromy_fidelity(const CMatrix& a, const CMatrix& b);

double dark_state_phase(const ModelSpec& model, const TrajectorySpec& traj, int n_periods);

}  // namespace fmslab
