#pragma once

#include <string>
#include <string_view>

#include "fmslab/numerics.hpp"

namespace fmslab {

enum class Family { TransmonEP2, RankK, Rydberg, PhotonicDimer };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);  // throws ConfigError

// One struct carries the parameters of every family; fields that a family does not use are
// ignored. The control parameter lambda enters through `hamiltonian`.
struct ModelSpec {
  Family family = Family::TransmonEP2;
  // TransmonEP2: [[0, J], [J, D - i kappa/2]], J = re(lambda) + j_offset, D = im(lambda) + d_offset
  double kappa = 1.0;
  double j_offset = 0.25;
  double d_offset = 0.0;
  // RankK: [[0, 1], [lambda^(k+1) + i delta e^(i offset_phase), 0]]
  int k = 1;
  double delta = 0.0;
  double offset_phase = 0.0;
  // Rydberg: [[0, W], [W, D - i gamma_loss]], W = re(lambda) + rabi_offset, D = im(lambda) + d_offset
  double gamma_loss = 1.0;
  double rabi_offset = 0.5;
  // PhotonicDimer: [[beta + im(lambda) - i gamma_a, c], [c, beta - i gamma_b]], c = re(lambda) + coupling
  double beta = 0.0;
  double coupling = 0.5;
  double gamma_a = 1.0;
  double gamma_b = 0.0;

  static ModelSpec transmon(double kappa);
  static ModelSpec rank_k(int k, double delta);
  static ModelSpec rydberg(double gamma_loss);
  static ModelSpec photonic(double gamma_a, double gamma_b);

  // Stokes rank of the singular point: k for RankK, 0 (tame) for the square-root families.
  int rank() const { return family == Family::RankK ? k : 0; }
  // Throws ConfigError on invalid parameters.
  void check() const;
};

struct EpLocation {
  cplx position;  // control-plane value of lambda
  cplx physical;  // the family's own coordinates, e.g. J + i*Delta for the transmon
  int order = 2;
};

CMatrix hamiltonian(const ModelSpec& model, cplx lambda);
EpLocation ep_location(const ModelSpec& model);

enum class TrajectoryKind { Loop, LinearSweep };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Loop;
  cplx center = 0.0;
  double radius = 0.0;
  double omega = 0.05;
  double start_angle = 0.0;
  int orientation = -1;
  int steps = 4096;
  double velocity = 0.0;  // LinearSweep only
  cplx offset = 0.0;      // LinearSweep only

  double period() const;
  void check() const;  // throws ConfigError
};

cplx trajectory_point(const TrajectorySpec& traj, double t);
// d lambda / dt along the trajectory.
cplx trajectory_velocity(const TrajectorySpec& traj, double t);

bool is_power_of_two(long long n);

}  // namespace fmslab
