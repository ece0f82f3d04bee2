#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fmslab/error.hpp"
#include "fmslab/models.hpp"

using namespace fmslab;

namespace {

const cplx I{0.0, 1.0};

double splitting(const CMatrix& h) {
  const auto e = eig_small(h);
  return std::abs(e[0].value - e[1].value);
}

double overlap(const CMatrix& h) {
  const auto e = eig_small(h);
  return std::abs(e[0].vector.dot(e[1].vector));
}

}  // namespace

TEST_CASE("transmon at the critical damping point") {
  const ModelSpec m = ModelSpec::transmon(1.0);
  const EpLocation ep = ep_location(m);
  CHECK(std::abs(ep.physical - cplx(0.25, 0.0)) < 1e-15);
  CHECK(ep.order == 2);
  const CMatrix h = hamiltonian(m, ep.position);
  CHECK(std::abs(h(0, 1) - 0.25) < 1e-15);
  CHECK(std::abs(h(1, 0) - 0.25) < 1e-15);
  CHECK(std::abs(h(1, 1) - cplx(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(h(0, 0)) == 0.0);
}

TEST_CASE("transmon control plane: re lambda drives J, im lambda drives the detuning") {
  const ModelSpec m = ModelSpec::transmon(1.0);
  const CMatrix h = hamiltonian(m, cplx(0.1, -0.2));
  CHECK(std::abs(h(0, 1) - 0.35) < 1e-15);
  CHECK(std::abs(h(1, 1) - cplx(-0.2, -0.5)) < 1e-15);
}

TEST_CASE("rank-k family") {
  const CMatrix nil = hamiltonian(ModelSpec::rank_k(2, 0.0), 0.0);
  CHECK((nil * nil).norm() == 0.0);
  CHECK(std::abs(nil(0, 1) - 1.0) == 0.0);
  const CMatrix h = hamiltonian(ModelSpec::rank_k(2, 0.1), 1.0);
  CHECK(std::abs(h(1, 0) - cplx(1.0, 0.1)) < 1e-15);
}

TEST_CASE("Rydberg and photonic exceptional points") {
  CHECK(std::abs(ep_location(ModelSpec::rydberg(1.0)).physical - 0.5) < 1e-15);
  CHECK(std::abs(ep_location(ModelSpec::photonic(1.0, 0.0)).physical - 0.5) < 1e-15);
}

TEST_CASE("every family coalesces at its exceptional point") {
  for (const ModelSpec& m : {ModelSpec::transmon(1.0), ModelSpec::transmon(0.3),
                             ModelSpec::rank_k(1, 0.1), ModelSpec::rank_k(3, 0.2),
                             ModelSpec::rydberg(1.0), ModelSpec::photonic(1.0, 0.0),
                             ModelSpec::photonic(0.2, 0.7)}) {
    CAPTURE(family_name(m.family));
    const CMatrix h = hamiltonian(m, ep_location(m).position);
    CHECK(std::abs(discriminant(h)) < 1e-10);
    CHECK(splitting(h) < 1e-7);
    CHECK(overlap(h) > 1.0 - 1e-6);
  }
}

TEST_CASE("rank-k discriminant has k+1 roots and ep_location returns one") {
  for (int k = 1; k <= 5; ++k) {
    const ModelSpec m = ModelSpec::rank_k(k, 0.3);
    const cplx pos = ep_location(m).position;
    CHECK(std::abs(std::pow(pos, k + 1) + I * 0.3) < 1e-14);
    int roots = 0;
    const double r = std::pow(0.3, 1.0 / (k + 1));
    for (int j = 0; j < 4 * (k + 1); ++j) {
      const cplx z = std::polar(r, std::arg(-I) / (k + 1) + 2.0 * std::numbers::pi * j / (k + 1));
      if (std::abs(discriminant(hamiltonian(m, z))) < 1e-12) ++roots;
    }
    CHECK(roots == 4 * (k + 1));
  }
}

TEST_CASE("loop trajectory") {
  TrajectorySpec t;
  t.center = cplx(0.2, -0.1);
  t.radius = 0.5;
  t.omega = 0.05;
  CHECK(std::abs(trajectory_point(t, 0.0) - (t.center + 0.5)) < 1e-15);
  CHECK(std::abs(trajectory_point(t, t.period() / 2.0) - (t.center - 0.5)) < 1e-14);
  CHECK(std::abs(trajectory_point(t, t.period()) - trajectory_point(t, 0.0)) < 1e-13);
  // Orientation -1 gives center + R e^{i omega t}: a quarter period later the point sits above.
  CHECK(std::abs(trajectory_point(t, t.period() / 4.0) - (t.center + cplx(0.0, 0.5))) < 1e-14);
  TrajectorySpec flipped = t;
  flipped.orientation = 1;
  CHECK(std::abs(trajectory_point(flipped, t.period() / 4.0) - (t.center - cplx(0.0, 0.5))) < 1e-14);
  TrajectorySpec still = t;
  still.radius = 0.0;
  CHECK(trajectory_point(still, 17.0) == still.center);
}

TEST_CASE("trajectory velocity matches a finite difference") {
  TrajectorySpec t;
  t.radius = 0.3;
  t.omega = 0.7;
  t.start_angle = 0.4;
  for (double s : {0.0, 1.3, 5.0}) {
    const double h = 1e-6;
    const cplx fd = (trajectory_point(t, s + h) - trajectory_point(t, s - h)) / (2.0 * h);
    CHECK(std::abs(fd - trajectory_velocity(t, s)) < 1e-8);
  }
  TrajectorySpec sweep;
  sweep.kind = TrajectoryKind::LinearSweep;
  sweep.velocity = 0.2;
  sweep.offset = cplx(0.0, 0.1);
  CHECK(std::abs(trajectory_point(sweep, sweep.period() / 2.0) - sweep.offset) < 1e-15);
  CHECK(trajectory_velocity(sweep, 3.0) == cplx(0.2, 0.0));
}

TEST_CASE("model and trajectory parameter validation") {
  CHECK_THROWS_AS(ModelSpec::transmon(0.0).check(), ConfigError);
  CHECK_THROWS_AS(ModelSpec::rank_k(0, 0.0).check(), ConfigError);
  CHECK_THROWS_AS(ModelSpec::rydberg(-1.0).check(), ConfigError);
  TrajectorySpec t;
  t.steps = 100;
  CHECK_THROWS_AS(t.check(), ConfigError);
  t.steps = 32;
  CHECK_THROWS_AS(t.check(), ConfigError);
  t.steps = 64;
  CHECK_NOTHROW(t.check());
  t.omega = 0.0;
  CHECK_THROWS_AS(t.check(), ConfigError);
  CHECK(parse_family("RankK") == Family::RankK);
  CHECK_THROWS_AS(parse_family("Qutrit"), ConfigError);
  CHECK_THROWS_AS(hamiltonian(ModelSpec::transmon(1.0), cplx(NAN, 0.0)), NumericalError);
}
