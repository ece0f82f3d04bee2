#include "fmslab/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fmslab {

namespace {

constexpr cplx I{0.0, 1.0};

// Real basis of n x n Hermitian matrices: diagonal units, then symmetric and antisymmetric pairs.
std::vector<Eigen::MatrixXcd> hermitian_basis(int n) {
  std::vector<Eigen::MatrixXcd> basis;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(n, n);
      sym(i, j) = r;
      sym(j, i) = r;
      basis.push_back(sym);
      Eigen::MatrixXcd anti = Eigen::MatrixXcd::Zero(n, n);
      anti(i, j) = -I * r;
      anti(j, i) = I * r;
      basis.push_back(anti);
    }
  }
  return basis;
}

double smallest_abs_eigenvalue(const Eigen::MatrixXcd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

}  // namespace

IsometryReport find_invariant_pairing(const CMatrix& s_in) {
  const int n = static_cast<int>(s_in.rows());
  const Eigen::MatrixXcd s = s_in;
  const auto basis = hermitian_basis(n);
  const int unknowns = n * n;

  // Columns: the map G -> S^dag G S - G applied to each basis element, flattened to reals.
  Eigen::MatrixXd system(2 * n * n, unknowns);
  for (int k = 0; k < unknowns; ++k) {
    const Eigen::MatrixXcd image = s.adjoint() * basis[static_cast<std::size_t>(k)] * s -
                                   basis[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        system(2 * (i * n + j), k) = image(i, j).real();
        system(2 * (i * n + j) + 1, k) = image(i, j).imag();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double s_norm2 = std::max(1.0, Eigen::JacobiSVD<Eigen::MatrixXcd>(s).singularValues()(0));
  const double scale = s_norm2 * s_norm2;

  // Null directions: singular values negligible relative to ||S||^2.
  std::vector<Eigen::VectorXd> null;
  for (int k = 0; k < unknowns; ++k) {
    if (sv(k) <= 1e-9 * scale) null.push_back(svd.matrixV().col(k));
  }
  if (null.empty()) null.push_back(svd.matrixV().col(unknowns - 1));

  auto assemble = [&](const Eigen::VectorXd& coeff) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < unknowns; ++k) g += coeff(k) * basis[static_cast<std::size_t>(k)];
    return Eigen::MatrixXcd(g / g.norm());
  };

  // Among unit-norm null combinations prefer the least degenerate form.
  Eigen::MatrixXcd best = assemble(null[0]);
  double best_cond = smallest_abs_eigenvalue(best);
  for (std::size_t a = 0; a < null.size(); ++a) {
    for (std::size_t b = a + 1; b < null.size(); ++b) {
      for (int step = 0; step < 360; ++step) {
        const double phi = std::numbers::pi * step / 360.0;
        const Eigen::MatrixXcd g = assemble(std::cos(phi) * null[a] + std::sin(phi) * null[b]);
        const double c = smallest_abs_eigenvalue(g);
        if (c > best_cond) {
          best_cond = c;
          best = g;
        }
      }
    }
  }

  IsometryReport rep;
  rep.stokes_matrix = s_in;
  rep.pairing = best;
  rep.raw_residual = (s.adjoint() * best * s - best).norm();
  rep.residual = rep.raw_residual / scale;
  rep.condition = best_cond;
  rep.null_dimension = 0;
  for (int k = 0; k < unknowns; ++k) {
    if (sv(k) <= 1e-9 * scale) ++rep.null_dimension;
  }
  rep.pass = rep.residual < 1e-6 && rep.condition > 1e-6;
  if (!rep.pass) {
    std::ostringstream msg;
    msg << "no non-degenerate invariant pairing: residual " << rep.residual << ", condition "
        << rep.condition << ", numerical null dimension " << rep.null_dimension;
    rep.diagnostic = msg.str();
  }
  return rep;
}

QuantizationReport quantization_check(const std::vector<ModelSpec>& models,
                                      const TrajectorySpec& traj, const PropagateOptions& opts) {
  QuantizationReport rep;
  for (const auto& m : models) rep.stokes.push_back(propagate(m, traj, opts).stokes_invariant);
  for (std::size_t a = 0; a < rep.stokes.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.stokes.size(); ++b) {
      rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.stokes[a] - rep.stokes[b]));
    }
  }
  rep.pass = rep.stokes.size() >= 3 && rep.max_deviation <= rep.tolerance;
  return rep;
}

}  // namespace fmslab
