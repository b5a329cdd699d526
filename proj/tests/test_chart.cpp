#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsp/chart.hpp"
#include "nsp/error.hpp"
#include "support.hpp"

using namespace nsp;

namespace {

double vdot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 lin(double a, const Vec3& x, double b, const Vec3& y) {
  return {a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
}
double vnorm(const Vec3& a) { return std::sqrt(vdot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Largest deviation of the six Frenet relations, checked with central
// differences of step h at a few interior chart points.
double frenet_fd_error(const BoundaryChart& c, double h) {
  double err = 0.0;
  for (double fx : {0.3, 0.5, 0.71})
    for (double fz : {0.2, 0.45, 0.8}) {
      const double xi = c.xi_min() + fx * (c.xi_max() - c.xi_min());
      const double ze = c.zeta_min() + fz * (c.zeta_max() - c.zeta_min());
      const Frame f = c.frame(xi, ze);
      const auto m = c.frenet(xi, ze);
      for (int dir = 0; dir < 2; ++dir) {
        const Frame p = dir == 0 ? c.frame(xi + h, ze) : c.frame(xi, ze + h);
        const Frame q = dir == 0 ? c.frame(xi - h, ze) : c.frame(xi, ze - h);
        const double m1 = dir == 0 ? m.m1 : m.m1p;
        const double m2 = dir == 0 ? m.m2 : m.m2p;
        const double m3 = dir == 0 ? m.m3 : m.m3p;
        const Vec3 de1 = lin(0.5 / h, p.e1, -0.5 / h, q.e1);
        const Vec3 de2 = lin(0.5 / h, p.e2, -0.5 / h, q.e2);
        const Vec3 dn = lin(0.5 / h, p.n, -0.5 / h, q.n);
        err = std::max(err, vnorm(sub(de1, lin(-m3, f.e2, -m1, f.n))));
        err = std::max(err, vnorm(sub(de2, lin(m3, f.e1, -m2, f.n))));
        err = std::max(err, vnorm(sub(dn, lin(m1, f.e1, m2, f.e2))));
      }
    }
  return err;
}

ScalarField component(const CoordinateMap& map, int c) {
  ScalarField out(map.size());
  for (std::size_t p = 0; p < map.size(); ++p) out[p] = map.x[p][c];
  return out;
}

// max |inverse-coefficient matrix * (x_xi, x_zeta, x_r) - I| with the
// Jacobian columns from chart finite differences.
double chain_rule_residual(const CoordinateMap& map) {
  std::array<FrameDerivatives, 3> dx;
  for (int c = 0; c < 3; ++c) dx[c] = frame_derivatives(component(map, c), map);
  double err = 0.0;
  for (std::size_t p = 0; p < map.size(); ++p) {
    const std::array<Vec3, 3> rows{map.xi_x[p], map.zeta_x[p], map.r_x[p]};
    for (int a = 0; a < 3; ++a) {
      const Vec3 col_xi{dx[0].d_xi[p], dx[1].d_xi[p], dx[2].d_xi[p]};
      const Vec3 col_ze{dx[0].d_zeta[p], dx[1].d_zeta[p], dx[2].d_zeta[p]};
      const Vec3 col_r{dx[0].d_r[p], dx[1].d_r[p], dx[2].d_r[p]};
      const std::array<Vec3, 3> cols{col_xi, col_ze, col_r};
      for (int b = 0; b < 3; ++b)
        err = std::max(err, std::abs(vdot(rows[a], cols[b]) - (a == b ? 1.0 : 0.0)));
    }
  }
  return err;
}

double trig(const Vec3& x) { return std::sin(x[0]) * std::cos(0.7 * x[1]) + x[2] * x[2] * x[0]; }
Vec3 trig_grad(const Vec3& x) {
  return {std::cos(x[0]) * std::cos(0.7 * x[1]) + x[2] * x[2],
          -0.7 * std::sin(x[0]) * std::sin(0.7 * x[1]), 2.0 * x[2] * x[0]};
}

}  // namespace

TEST_CASE("plane charts are flat") {
  const auto spec = DomainSpec::box({1.0, 2.0, 3.0}, {8, 8, 8});
  CHECK(chart_count(spec) == 6);
  for (int w = 0; w < 6; ++w) {
    const auto c = boundary_chart(spec, w);
    const auto m = c.frenet(0.3, 0.4);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 0.0);
    CHECK(m.m3 == 0.0);
    CHECK(m.m1p == 0.0);
    CHECK(m.m2p == 0.0);
    CHECK(m.m3p == 0.0);
    const Frame f = c.frame(0.3, 0.4);
    CHECK(vnorm(sub(cross(f.e1, f.e2), f.n)) < 1e-15);
    const auto map = coordinate_map(c, -0.2, 0.0, 5);
    for (std::size_t p = 0; p < map.size(); ++p) CHECK(map.J[p] == 1.0);
    // The outward normal points away from the box centre.
    const Vec3 centre{0.5, 1.0, 1.5};
    CHECK(vdot(f.n, sub(c.point(0.3, 0.4), centre)) > 0.0);
  }
}

TEST_CASE("periodic axes have no chart") {
  const auto spec = DomainSpec::box({1.0, 1.0, 1.0}, {8, 8, 8}, {true, false, true});
  CHECK(chart_count(spec) == 4);
  CHECK(boundary_charts(spec).size() == 4);
  CHECK_THROWS_AS(boundary_chart(spec, 2), Error);
}

TEST_CASE("sphere chart normalisation and orthonormal frame") {
  const auto spec = DomainSpec::annulus(1.0, 2.5, 32);
  for (int w = 0; w < 4; ++w) {
    const auto c = boundary_chart(spec, w);
    const double a = c.radius();
    double worst = 0.0;
    double tau = 1e300;
    for (int i = 0; i < c.n_xi(); ++i)
      for (int j = 0; j < c.n_zeta(); ++j) {
        const double xi = c.xi_node(i), ze = c.zeta_node(j);
        const Frame f = c.frame(xi, ze);
        const Vec3 zx = c.z_xi(xi, ze);
        const Vec3 zz = c.z_zeta(xi, ze);
        worst = std::max(worst, std::abs(vnorm(zx) - 1.0));
        worst = std::max(worst, std::abs(vdot(zx, zz)));
        for (const auto* v : {&f.e1, &f.e2, &f.n}) worst = std::max(worst, std::abs(vnorm(*v) - 1.0));
        worst = std::max(worst, std::abs(vdot(f.e1, f.e2)));
        worst = std::max(worst, std::abs(vdot(f.e1, f.n)));
        worst = std::max(worst, std::abs(vdot(f.e2, f.n)));
        worst = std::max(worst, vnorm(sub(cross(f.e1, f.e2), f.n)));
        worst = std::max(worst, std::abs(vnorm(c.point(xi, ze)) - a));
        // External normal: away from the centre on the outer sphere, towards it on the inner one.
        const double radial = vdot(f.n, c.point(xi, ze)) / a;
        worst = std::max(worst, std::abs(radial - c.orientation()));
        tau = std::min(tau, vnorm(zz));
      }
    CHECK(worst < 1e-10);
    CHECK(tau >= a * std::sin(BoundaryChart::kBandLow) - 1e-12);
  }
}

TEST_CASE("Frenet coefficients match finite differences at second order") {
  const auto spec = DomainSpec::annulus(0.8, 2.0, 32);
  for (int w = 0; w < 4; ++w) {
    const auto c = boundary_chart(spec, w);
    const double e1 = frenet_fd_error(c, 0.02);
    const double e2 = frenet_fd_error(c, 0.01);
    const double e3 = frenet_fd_error(c, 0.005);
    CHECK(test::observed_order(e1, e2) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(test::observed_order(e2, e3) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("two charts per sphere cover it with their cutoff cores") {
  const auto spec = DomainSpec::annulus(1.0, 2.0, 32);
  const auto charts = boundary_charts(spec);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 2000; ++s) {
    Vec3 x{nd(rng), nd(rng), nd(rng)};
    bool core = false;
    for (int w = 0; w < 2; ++w) {
      const double th = charts[w].polar_angle(x);
      core = core || (th >= BoundaryChart::kCoreLow && th <= std::numbers::pi - BoundaryChart::kCoreLow);
      if (th >= BoundaryChart::kCoreLow && th <= std::numbers::pi - BoundaryChart::kCoreLow)
        CHECK(charts[w].covers(x));
    }
    CHECK(core);
  }
}

TEST_CASE("coordinate map metric identities") {
  const auto spec = DomainSpec::annulus(1.0, 2.0, 32);
  for (int w = 0; w < 4; ++w) {
    const auto c = boundary_chart(spec, w, 17, 33);
    const double depth = default_collar_depth(spec, c);
    CHECK(depth == doctest::Approx(0.25));
    const auto map = coordinate_map(c, depth, 9);
    CHECK(map.depth == depth);
    for (std::size_t p = 0; p < map.size(); ++p) {
      CHECK(std::abs(map.J[p] - (map.A[p] * map.D[p] - map.B[p] * map.C[p])) <= 1e-14 * map.J[p]);
      CHECK(map.J[p] > 0.0);
    }
    // r = 0 layer: J = |z_zeta|.
    for (int i = 0; i < c.n_xi(); ++i) {
      const std::size_t p = map.index(i, 3, map.n_r - 1);
      CHECK(map.J[p] == doctest::Approx(c.z_zeta_norm(c.xi_node(i), c.zeta_node(3))).epsilon(1e-14));
    }
  }
}

TEST_CASE("deep collars are shrunk until the map is regular") {
  const auto c = BoundaryChart::sphere(1.0, true, 2, 9, 9);
  const auto map = coordinate_map(c, 1.5, 5);
  CHECK(map.depth < 1.0);
  for (double j : map.J) CHECK(j > 0.0);
  CHECK_THROWS_AS(coordinate_map(c, -1.5, 0.0, 5), Error);
}

TEST_CASE("Jacobian matches the cross product of finite-difference tangents") {
  const double a = 1.5;
  const auto c0 = BoundaryChart::sphere(a, true, 2, 9, 9);
  double prev = 0.0;
  for (double h : {0.02, 0.01, 0.005}) {
    double err = 0.0;
    for (double fx : {0.25, 0.5, 0.8})
      for (double fr : {0.2, 0.6, 0.95}) {
        const double xi = c0.xi_min() + fx * (c0.xi_max() - c0.xi_min());
        const double ze = 1.1;
        const double r = fr * a / 4.0;
        auto X = [&](double s, double t, double rr) {
          return lin(1.0, c0.point(s, t), rr, c0.frame(s, t).n);
        };
        const Vec3 xx = lin(0.5 / h, X(xi + h, ze, r), -0.5 / h, X(xi - h, ze, r));
        const Vec3 xz = lin(0.5 / h, X(xi, ze + h, r), -0.5 / h, X(xi, ze - h, r));
        const double J = std::sin(xi / a) * (a + r) * (a + r) / a;
        err = std::max(err, std::abs(vnorm(cross(xx, xz)) - J));
      }
    if (prev > 0.0) CHECK(test::observed_order(prev, err) == doctest::Approx(2.0).epsilon(0.1));
    prev = err;
  }
  // The closed form used above is the one stored in the map.
  const auto map = coordinate_map(c0, 0.0, a / 4.0, 5);
  for (int i = 0; i < c0.n_xi(); ++i)
    for (int k = 0; k < 5; ++k) {
      const double r = map.r_node(k);
      const double xi = c0.xi_node(i);
      CHECK(map.J[map.index(i, 2, k)] ==
            doctest::Approx(std::sin(xi / a) * (a + r) * (a + r) / a).epsilon(1e-14));
    }
}

TEST_CASE("chain-rule identity converges at second order") {
  for (bool outer : {false, true}) {
    const auto make = [&](int n) {
      const auto c = BoundaryChart::sphere(outer ? 2.0 : 1.0, outer, outer ? 0 : 2, n, 2 * n - 1);
      return coordinate_map(c, 0.25, n);
    };
    const double e1 = chain_rule_residual(make(9));
    const double e2 = chain_rule_residual(make(17));
    const double e3 = chain_rule_residual(make(33));
    CHECK(test::observed_order(e1, e2) >= 1.8);
    CHECK(test::observed_order(e2, e3) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("frame derivatives") {
  const auto c = BoundaryChart::sphere(2.0, true, 2, 17, 33);
  const auto map = coordinate_map(c, 0.3, 9);

  const ScalarField one(map.size(), 4.2);
  const auto d0 = frame_derivatives(one, map);
  CHECK(max_abs(d0.d_xi) < 1e-13);
  CHECK(max_abs(d0.d_zeta) < 1e-13);
  CHECK(max_abs(d0.d_r) < 1e-13);

  const ScalarField dist = map.sample([](const Vec3& x) { return std::sqrt(vdot(x, x)) - 2.0; });
  const auto dd = frame_derivatives(dist, map);
  CHECK(max_abs(dd.d_xi) < 1e-12);
  CHECK(max_abs(dd.d_zeta) < 1e-12);
  for (double v : dd.d_r) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(frame_derivatives(ScalarField(3, 0.0), map), Error);
}

TEST_CASE("gradient reconstruction converges at second order") {
  for (int w : {0, 3}) {
    const auto spec = DomainSpec::annulus(1.0, 2.0, 32);
    std::vector<double> errs;
    for (int n : {9, 17, 33}) {
      const auto c = boundary_chart(spec, w, n, 2 * n - 1);
      const auto map = coordinate_map(c, 0.25, n);
      const ScalarField f = map.sample(trig);
      const auto g = reconstruct_gradient(frame_derivatives(f, map), map);
      double err = 0.0;
      for (std::size_t p = 0; p < map.size(); ++p)
        err = std::max(err, vnorm(sub(g[p], trig_grad(map.x[p]))));
      errs.push_back(err);
    }
    CHECK(test::observed_order(errs[1], errs[2]) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("commutator residual") {
  const auto spec = DomainSpec::annulus(1.0, 2.0, 32);
  const auto c = boundary_chart(spec, 2, 17, 33);
  const auto map = coordinate_map(c, 0.25, 9);
  CHECK_FALSE(commutator_residual(ScalarField(map.size(), 1.0), map).has_value());

  const auto box = DomainSpec::box({1.0, 1.0, 1.0}, {8, 8, 8});
  const auto pmap = coordinate_map(boundary_chart(box, 3), 0.25, 9);
  const auto flat = commutator_residual(pmap.sample(trig), pmap);
  REQUIRE(flat.has_value());
  CHECK(*flat < 1e-10);

  // Random smooth fields on a sphere collar: bounded ratio, stable under refinement.
  std::vector<double> worst;
  for (int n : {9, 17}) {
    const auto cs = boundary_chart(spec, 1, n, 2 * n - 1);
    const auto m = coordinate_map(cs, 0.25, n);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    double mx = 0.0;
    for (int s = 0; s < 20; ++s) {
      const Vec3 k{ud(rng), ud(rng), ud(rng)};
      const double ph = ud(rng);
      const ScalarField f = m.sample([&](const Vec3& x) { return std::sin(vdot(k, x) + ph); });
      const auto r = commutator_residual(f, m);
      REQUIRE(r.has_value());
      CHECK(std::isfinite(*r));
      mx = std::max(mx, *r);
    }
    worst.push_back(mx);
  }
  MESSAGE("sphere commutator constant: " << worst[0] << " -> " << worst[1]);
  CHECK(std::abs(worst[1] - worst[0]) < 0.25 * worst[1]);
}
