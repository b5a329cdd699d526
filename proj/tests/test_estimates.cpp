#include <cmath>

#include "doctest.h"
#include "nsp/error.hpp"
#include "nsp/estimates.hpp"
#include "nsp/ops.hpp"

using namespace nsp;

namespace {

SchemeParams scheme() {
  SchemeParams p;
  p.gamma = 1.4;
  return p;
}

struct Setup {
  Grid grid;
  SteadyState ss;
};

Setup annulus(int n) {
  Grid g = build_grid(DomainSpec::annulus(1.0, 2.0, n));
  SteadyState ss = solve_steady(BackgroundProfile::bump(g, 1.0, 0.5, {1.5, 0, 0}, 0.25), 1.4, g);
  return {std::move(g), std::move(ss)};
}

PerturbationState random_state(const Setup& s, std::uint64_t seed) {
  InitialCondition ic;
  ic.family = "random";
  ic.seed = seed;
  ic.amplitude = 1e-2;
  ic.velocity_amplitude = 1e-2;
  auto [q, u] = build_initial(s.grid, ic);
  return make_initial_state(s.grid, q, u, s.ss, scheme());
}

template <class F>
double max_ratio(const Setup& s, F&& verify) {
  double m = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EstimateReport r = verify(s.grid, random_state(s, seed), s.ss, scheme());
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    m = std::max(m, r.ratio);
  }
  return m;
}

}  // namespace

TEST_CASE("estimates reject the zero state") {
  const Setup s = annulus(32);
  const PerturbationState z = PerturbationState::zero(s.grid);
  for (auto verify : {verify_elliptic_estimate, verify_stokes_estimate}) {
    try {
      verify(s.grid, z, s.ss, scheme());
      FAIL("expected DegenerateState");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateState);
    }
  }
}

TEST_CASE("Stokes estimate with a resting fluid") {
  const Setup s = annulus(64);
  ScalarField q = mean_zero_mode(s.grid, 1);
  for (double& v : q) v *= 1e-2;
  const PerturbationState st = make_initial_state(s.grid, q, VectorField(1, s.grid.size()), s.ss, scheme());
  const EstimateReport r = verify_stokes_estimate(s.grid, st, s.ss, scheme());
  CHECK(r.terms.at("D2u") == 0.0);
  CHECK(r.lhs == r.terms.at("D_potential"));
  CHECK(r.lhs > 0.0);
  CHECK(std::isfinite(r.ratio));
  const EstimateReport e = verify_elliptic_estimate(s.grid, st, s.ss, scheme());
  CHECK(e.lhs == 0.0);
  CHECK(e.ratio == 0.0);
}

TEST_CASE("measured estimate constants are stable under refinement") {
  const Setup coarse = annulus(64), fine = annulus(128);
  const double e1 = max_ratio(coarse, verify_elliptic_estimate);
  const double e2 = max_ratio(fine, verify_elliptic_estimate);
  const double s1 = max_ratio(coarse, verify_stokes_estimate);
  const double s2 = max_ratio(fine, verify_stokes_estimate);
  MESSAGE("elliptic " << e1 << " -> " << e2 << ", Stokes " << s1 << " -> " << s2);
  CHECK(std::abs(e2 / e1 - 1.0) < 0.25);
  CHECK(std::abs(s2 / s1 - 1.0) < 0.25);
}
