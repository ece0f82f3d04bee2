#pragma once

#include <string>
#include <vector>

#include "fmslab/floquet.hpp"
#include "fmslab/models.hpp"
#include "fmslab/numerics.hpp"

namespace fmslab {

struct IsometryReport {
  CMatrix stokes_matrix;
  CMatrix pairing;              // Hermitian G with unit Frobenius norm
  double residual = 0.0;        // ||S^dag G S - G||_F / ||S||_2^2
  double raw_residual = 0.0;    // ||S^dag G S - G||_F
  double condition = 0.0;       // smallest |eigenvalue| of G
  int null_dimension = 0;
  bool pass = false;
  std::string diagnostic;
};

IsometryReport find_invariant_pairing(const CMatrix& s);

struct QuantizationReport {
  std::vector<double> stokes;
  double max_deviation = 0.0;
  double tolerance = 0.05;
  bool pass = false;
};

QuantizationReport quantization_check(const std::vector<ModelSpec>& models,
                                      const TrajectorySpec& traj,
                                      const PropagateOptions& opts = {});

}  // namespace fmslab
