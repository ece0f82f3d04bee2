#include <doctest.h>

#include <cmath>
#include <random>

#include "fmslab/isometry.hpp"
#include "support.hpp"

using namespace fmslab;

namespace {

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

}  // namespace

TEST_CASE("identity admits a definite pairing") {
  const IsometryReport r = find_invariant_pairing(identity(2));
  CHECK(r.pass);
  CHECK(r.residual == 0.0);
  CHECK(r.condition == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("unitary matrices preserve the identity form") {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 4}) {
    const CMatrix a = test::random_matrix(rng, n);
    const CMatrix herm = a + a.adjoint();
    const CMatrix u = test::taylor_expm(-I * herm);
    const IsometryReport r = find_invariant_pairing(u);
    CHECK(r.pass);
    CHECK(r.residual < 1e-12);
    CHECK((r.pairing - r.pairing.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("unipotent Stokes matrix: two-dimensional null space, indefinite pairing") {
  const CMatrix s = mat2(1, cplx(0.8, -0.3), 0, 1);
  const IsometryReport r = find_invariant_pairing(s);
  CHECK(r.null_dimension == 2);
  CHECK(r.pass);
  CHECK(r.residual < 1e-12);
  // Direct construction oracle: G = [[0, i s], [-i conj(s), 0]] is invariant.
  const CMatrix g = mat2(0, I * s(0, 1), -I * std::conj(s(0, 1)), 0);
  CHECK((s.adjoint() * g * s - g).norm() < 1e-14);
}

TEST_CASE("a generic non-normal matrix has no invariant form") {
  const CMatrix s = mat2(2.0, 1.0, cplx(0.0, 0.3), cplx(0.5, 0.5));
  const IsometryReport r = find_invariant_pairing(s);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("encircling monodromies carry an invariant pairing") {
  const ModelSpec m = ModelSpec::transmon(1.0);
  PropagateOptions o;
  o.tolerance = 1e-6;
  o.require_convergence = false;
  const MonodromyResult r = propagate(m, loop(0.0, 0.15, 0.05), o);
  const IsometryReport rep = find_invariant_pairing(r.normalized);
  CHECK(rep.pass);
  CHECK(rep.residual < 1e-6);
}

TEST_CASE("quantization check across platforms sharing the rank-1 kernel") {
  PropagateOptions o;
  o.tolerance = 1e-6;
  o.require_convergence = false;
  const std::vector<ModelSpec> platforms = {ModelSpec::transmon(1.0), ModelSpec::rydberg(0.5),
                                            ModelSpec::photonic(0.5, 0.0)};
  const QuantizationReport r = quantization_check(platforms, loop(0.0, 0.15, 0.05), o);
  REQUIRE(r.stokes.size() == 3);
  CHECK(r.max_deviation <= r.tolerance);
  CHECK(r.pass);
  // Under the shared embedding the three Hamiltonians differ by a multiple of the identity, so
  // the residual spread is propagation error only.
  CHECK(r.max_deviation < 1e-6);
  // Halving omega again lets non-Hermitian growth amplify roundoff in Im Tr past the tolerance.
  const QuantizationReport slow = quantization_check(platforms, loop(0.0, 0.15, 0.025), o);
  CHECK(slow.max_deviation > r.max_deviation);
  // Negative control: a deformed rank-2 kernel does not share the plateau.
  const QuantizationReport mixed = quantization_check(
      {ModelSpec::transmon(1.0), ModelSpec::rydberg(0.5), ModelSpec::rank_k(2, 0.3)}, loop(0.0, 0.15, 0.2), o);
  CHECK_FALSE(mixed.pass);
  CHECK(mixed.max_deviation > 1.0);
}
