#include "fmslab/models.hpp"

#include <cmath>
#include <numbers>

#include "fmslab/error.hpp"

namespace fmslab {

namespace {
constexpr cplx I{0.0, 1.0};
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::TransmonEP2: return "TransmonEP2";
    case Family::RankK: return "RankK";
    case Family::Rydberg: return "Rydberg";
    case Family::PhotonicDimer: return "PhotonicDimer";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "TransmonEP2") return Family::TransmonEP2;
  if (name == "RankK") return Family::RankK;
  if (name == "Rydberg") return Family::Rydberg;
  if (name == "PhotonicDimer") return Family::PhotonicDimer;
  throw ConfigError("unknown model family '" + std::string(name) + "'");
}

ModelSpec ModelSpec::transmon(double kappa) {
  ModelSpec m;
  m.family = Family::TransmonEP2;
  m.kappa = kappa;
  m.j_offset = kappa / 4.0;
  m.d_offset = 0.0;
  return m;
}

ModelSpec ModelSpec::rank_k(int k, double delta) {
  ModelSpec m;
  m.family = Family::RankK;
  m.k = k;
  m.delta = delta;
  return m;
}

ModelSpec ModelSpec::rydberg(double gamma_loss) {
  ModelSpec m;
  m.family = Family::Rydberg;
  m.gamma_loss = gamma_loss;
  m.rabi_offset = gamma_loss / 2.0;
  m.d_offset = 0.0;
  return m;
}

ModelSpec ModelSpec::photonic(double gamma_a, double gamma_b) {
  ModelSpec m;
  m.family = Family::PhotonicDimer;
  m.gamma_a = gamma_a;
  m.gamma_b = gamma_b;
  m.coupling = std::abs(gamma_a - gamma_b) / 2.0;
  return m;
}

void ModelSpec::check() const {
  switch (family) {
    case Family::TransmonEP2:
      if (!(kappa > 0.0)) throw ConfigError("model.kappa: must be > 0");
      break;
    case Family::RankK:
      if (k < 1) throw ConfigError("model.k: must be >= 1");
      break;
    case Family::Rydberg:
      if (!(gamma_loss > 0.0)) throw ConfigError("model.gamma_loss: must be > 0");
      break;
    case Family::PhotonicDimer:
      break;
  }
}

CMatrix hamiltonian(const ModelSpec& model, cplx lambda) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw NumericalError("hamiltonian: non-finite lambda");
  }
  CMatrix h = CMatrix::Zero(2, 2);
  switch (model.family) {
    case Family::TransmonEP2: {
      const double j = lambda.real() + model.j_offset;
      const double d = lambda.imag() + model.d_offset;
      h(0, 1) = j;
      h(1, 0) = j;
      h(1, 1) = cplx(d, -model.kappa / 2.0);
      break;
    }
    case Family::RankK: {
      h(0, 1) = 1.0;
      h(1, 0) = std::pow(lambda, model.k + 1) + I * model.delta * std::polar(1.0, model.offset_phase);
      break;
    }
    case Family::Rydberg: {
      const double w = lambda.real() + model.rabi_offset;
      const double d = lambda.imag() + model.d_offset;
      h(0, 1) = w;
      h(1, 0) = w;
      h(1, 1) = cplx(d, -model.gamma_loss);
      break;
    }
    case Family::PhotonicDimer: {
      const double c = lambda.real() + model.coupling;
      h(0, 0) = cplx(model.beta + lambda.imag(), -model.gamma_a);
      h(0, 1) = c;
      h(1, 0) = c;
      h(1, 1) = cplx(model.beta, -model.gamma_b);
      break;
    }
  }
  return h;
}

EpLocation ep_location(const ModelSpec& model) {
  EpLocation ep;
  switch (model.family) {
    case Family::TransmonEP2: {
      const double j = model.kappa / 4.0;
      ep.physical = cplx(j, 0.0);
      ep.position = cplx(j - model.j_offset, -model.d_offset);
      break;
    }
    case Family::RankK: {
      // Roots of lambda^(k+1) = -i delta e^(i phase); pick the one closest to the positive real axis.
      const cplx target = -I * model.delta * std::polar(1.0, model.offset_phase);
      const int p = model.k + 1;
      const double r = std::pow(std::abs(target), 1.0 / p);
      const double base = std::arg(target);
      cplx best = 0.0;
      double best_arg = 1e300;
      for (int m = 0; m < p; ++m) {
        const cplx root = std::polar(r, (base + 2.0 * std::numbers::pi * m) / p);
        const double a = std::abs(std::arg(root));
        if (a < best_arg - 1e-12) {
          best_arg = a;
          best = root;
        }
      }
      ep.position = best;
      ep.physical = best;
      break;
    }
    case Family::Rydberg: {
      const double w = model.gamma_loss / 2.0;
      ep.physical = cplx(w, 0.0);
      ep.position = cplx(w - model.rabi_offset, -model.d_offset);
      break;
    }
    case Family::PhotonicDimer: {
      const double c = std::abs(model.gamma_a - model.gamma_b) / 2.0;
      ep.physical = cplx(c, 0.0);
      ep.position = cplx(c - model.coupling, 0.0);
      break;
    }
  }
  return ep;
}

double TrajectorySpec::period() const { return 2.0 * std::numbers::pi / omega; }

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

void TrajectorySpec::check() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("trajectory.omega: must be > 0");
  if (!(radius >= 0.0)) throw ConfigError("trajectory.radius: must be >= 0");
  if (steps < 64) throw ConfigError("trajectory.steps: must be >= 64");
  if (!is_power_of_two(steps)) throw ConfigError("trajectory.steps: must be a power of two");
  if (orientation != 1 && orientation != -1) throw ConfigError("trajectory.orientation: must be +1 or -1");
}

cplx trajectory_point(const TrajectorySpec& traj, double t) {
  if (traj.kind == TrajectoryKind::Loop) {
    return traj.center +
           traj.radius * std::exp(I * static_cast<double>(traj.orientation) *
                                  (traj.start_angle - traj.omega * t));
  }
  return traj.velocity * (t - traj.period() / 2.0) + traj.offset;
}

cplx trajectory_velocity(const TrajectorySpec& traj, double t) {
  if (traj.kind == TrajectoryKind::Loop) {
    const double o = static_cast<double>(traj.orientation);
    return -I * o * traj.omega * traj.radius * std::exp(I * o * (traj.start_angle - traj.omega * t));
  }
  return traj.velocity;
}

}  // namespace fmslab
