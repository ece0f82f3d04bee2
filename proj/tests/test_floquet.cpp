#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fmslab/error.hpp"
#include "fmslab/floquet.hpp"
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

TrajectorySpec loop(cplx center, double radius, double omega, int steps = 1024) {
  TrajectorySpec t;
  t.center = center;
  t.radius = radius;
  t.omega = omega;
  t.steps = steps;
  return t;
}

PropagateOptions lenient(double tol = 1e-6) {
  PropagateOptions o;
  o.tolerance = tol;
  o.require_convergence = false;
  return o;
}

// A smooth drive with a nonzero trace and loss on one level.
const HamiltonianFn kDrive = [](double t) {
  return mat2(cplx(0.3 * std::cos(t), -0.1), 0.4 + 0.2 * std::sin(2.0 * t), 0.4, cplx(-0.2, -0.3));
};

}  // namespace

TEST_CASE("constant diagonal Hamiltonian") {
  const cplx e1(0.7, -0.05), e2(-0.3, 0.0);
  const double period = 3.0;
  const MonodromyResult r = propagate([&](double) { return mat2(e1, 0, 0, e2); }, period, 64);
  CHECK(std::abs(r.monodromy(0, 0) - std::exp(-I * e1 * period)) < 1e-13);
  CHECK(std::abs(r.monodromy(1, 1) - std::exp(-I * e2 * period)) < 1e-13);
  CHECK(std::abs(r.monodromy(0, 1)) < 1e-15);
  CHECK(r.converged);
}

TEST_CASE("a loop of zero radius is the autonomous propagator") {
  const ModelSpec m = ModelSpec::transmon(1.0);
  const TrajectorySpec t = loop(cplx(0.1, 0.05), 0.0, 0.5, 64);
  const MonodromyResult r = propagate(m, t);
  const CMatrix ref = test::taylor_expm(-I * hamiltonian(m, t.center) * t.period());
  CHECK((r.monodromy - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("determinant identity det U = exp(-i integral of trace H)") {
  const double period = 2.0 * kPi;
  const Evolution e = evolve(kDrive, 0.0, period, 512);
  // Exact trace integral: trace H = 0.3 cos t - 0.2 - 0.4 i.
  const cplx trint = cplx(-0.2, -0.4) * period;
  const cplx det = Eigen::MatrixXcd(e.matrix()).determinant();
  CHECK(std::abs(det - std::exp(-I * trint)) < 1e-8 * std::abs(det));
  CHECK(std::abs(e.trace_integral - trint) < 1e-12);
}

TEST_CASE("Hermitian drive gives a unitary propagator") {
  const HamiltonianFn h = [](double t) { return mat2(std::cos(t), 0.3, 0.3, -std::cos(t)); };
  const MonodromyResult r = propagate(h, 2.0 * kPi, 256);
  CHECK((r.monodromy.adjoint() * r.monodromy - identity(2)).norm() < 1e-9);
  CHECK(std::abs(r.stokes_invariant) <= 2.0);
}

TEST_CASE("composition of half periods") {
  const double period = 5.0;
  const Evolution whole = evolve(kDrive, 0.0, period, 1024);
  const Evolution first = evolve(kDrive, 0.0, period / 2.0, 512);
  const Evolution second = evolve(kDrive, period / 2.0, period, 512);
  const CMatrix composed = second.matrix() * first.matrix();
  CHECK((composed - whole.matrix()).norm() < 1e-8 * whole.matrix().norm());
}

TEST_CASE("step doubling converges at second order") {
  const double period = 5.0;
  const CMatrix u1 = evolve(kDrive, 0.0, period, 128).matrix();
  const CMatrix u2 = evolve(kDrive, 0.0, period, 256).matrix();
  const CMatrix u3 = evolve(kDrive, 0.0, period, 512).matrix();
  const double ratio = (u1 - u2).norm() / (u2 - u3).norm();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("strict non-convergence reports both norms") {
  PropagateOptions o;
  o.tolerance = 1e-15;
  o.max_steps = 256;
  try {
    propagate(kDrive, 5.0, 64, o);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("||U_N - U_2N||") != std::string::npos);
    CHECK(msg.find("||U_2N||") != std::string::npos);
  }
  o.require_convergence = false;
  const MonodromyResult r = propagate(kDrive, 5.0, 64, o);
  CHECK_FALSE(r.converged);
  CHECK(r.step_count_used == 256);
}

TEST_CASE("quasienergies") {
  for (const cplx e : quasienergies(identity(2), 3.0)) CHECK(std::abs(e) < 1e-15);
  const double period = 2.0, energy = 0.4;
  const auto eps = quasienergies(mat2(std::exp(-I * energy * period), 0, 0, std::exp(I * energy * period)), period);
  // U = e^{-iET} gives epsilon = +E.
  CHECK(std::abs(eps[0].real() - energy) < 1e-14);
  CHECK(std::abs(eps[1].real() + energy) < 1e-14);
  // Folding into [-omega/2, omega/2).
  const double omega = 2.0 * kPi / period;
  const auto folded = quasienergies(mat2(std::exp(-I * 2.0 * period), 0, 0, 1), period);
  CHECK(std::abs(folded[0].real() - (2.0 - omega)) < 1e-12);
  CHECK(quasienergy_splitting(eps, period) == doctest::Approx(2.0 * energy));
  CHECK_THROWS_AS(quasienergies(CMatrix::Zero(2, 2), 1.0), NumericalError);
}

TEST_CASE("normalize") {
  CHECK((normalize(cplx(0.3, -2.0) * identity(2)) - identity(2)).norm() < 1e-14);
  std::mt19937_64 rng(2);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const CMatrix m = normalize(test::random_matrix(rng, n));
      CHECK(std::abs(Eigen::MatrixXcd(m).determinant() - 1.0) < 1e-12);
      if (n == 2) CHECK(m.trace().real() >= 0.0);
    }
  }
  CHECK_THROWS_AS(normalize(CMatrix::Zero(2, 2)), NumericalError);
}

TEST_CASE("propagated normalized monodromy has unit determinant") {
  const MonodromyResult r = propagate(ModelSpec::rank_k(1, 0.0), loop(0.0, 1.0, 0.2), lenient());
  // A nearly rank-one product loses digits in ad - bc in proportion to ||M||^2.
  const double scale = r.normalized.squaredNorm();
  CHECK(std::abs(Eigen::MatrixXcd(r.normalized).determinant() - 1.0) < 1e-13 * scale);
}

TEST_CASE("unipotent part") {
  CHECK((unipotent_part(mat2(2.0, 0, 0, 0.5)) - identity(2)).norm() == 0.0);
  const CMatrix jordan = mat2(1, 0.7, 0, 1);
  CHECK((unipotent_part(jordan) - jordan).norm() < 1e-15);
  CHECK((unipotent_part(-jordan) - jordan).norm() < 1e-15);
}

TEST_CASE("stokes invariant and fidelity") {
  MonodromyResult r;
  r.normalized = identity(2);
  CHECK(stokes_invariant(r) == 0.0);
  CHECK(monodromy_fidelity(identity(2), identity(2)) == doctest::Approx(1.0));
  CHECK(monodromy_fidelity(identity(2), mat2(0, I, I, 0)) < 1e-15);
  CHECK_THROWS_AS(monodromy_fidelity(identity(2), identity(3)), NumericalError);
}

TEST_CASE("a loop that does not enclose the exceptional point") {
  const ModelSpec m = ModelSpec::transmon(1.0);
  const cplx ep = ep_location(m).position;
  const cplx center = ep + cplx(0.2, 0.0);
  const TrajectorySpec t = loop(center, 0.5 * std::abs(center - ep), 0.05, 4096);
  const MonodromyResult r = propagate(m, t, lenient());
  CHECK(std::abs(r.stokes_invariant) < 0.05);
  const double phase = dark_state_phase(m, t, 1);
  CHECK(std::abs(std::remainder(phase, 2.0 * kPi)) < 0.05);
}
