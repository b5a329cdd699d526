#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nsp/chart.hpp"

namespace nsp::cli {

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

double orthonormality(const BoundaryChart& c) {
  double worst = 0.0;
  for (int i = 0; i < c.n_xi(); ++i)
    for (int j = 0; j < c.n_zeta(); ++j) {
      const double xi = c.xi_node(i), ze = c.zeta_node(j);
      const Frame f = c.frame(xi, ze);
      worst = std::max(worst, std::abs(vnorm(c.z_xi(xi, ze)) - 1.0));
      worst = std::max(worst, std::abs(vdot(c.z_xi(xi, ze), c.z_zeta(xi, ze))));
      for (const Vec3* v : {&f.e1, &f.e2, &f.n}) worst = std::max(worst, std::abs(vnorm(*v) - 1.0));
      worst = std::max(worst, std::abs(vdot(f.e1, f.e2)));
      worst = std::max(worst, std::abs(vdot(f.e1, f.n)));
      worst = std::max(worst, std::abs(vdot(f.e2, f.n)));
      worst = std::max(worst, vnorm(sub(cross(f.e1, f.e2), f.n)));
    }
  return worst;
}

double frenet_error(const BoundaryChart& c, double h) {
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

double chain_rule_error(const CoordinateMap& map) {
  std::array<FrameDerivatives, 3> dx;
  for (int c = 0; c < 3; ++c) dx[c] = frame_derivatives(component(map, c), map);
  double err = 0.0;
  for (std::size_t p = 0; p < map.size(); ++p) {
    const std::array<Vec3, 3> rows{map.xi_x[p], map.zeta_x[p], map.r_x[p]};
    const std::array<Vec3, 3> cols{Vec3{dx[0].d_xi[p], dx[1].d_xi[p], dx[2].d_xi[p]},
                                   Vec3{dx[0].d_zeta[p], dx[1].d_zeta[p], dx[2].d_zeta[p]},
                                   Vec3{dx[0].d_r[p], dx[1].d_r[p], dx[2].d_r[p]}};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        err = std::max(err, std::abs(vdot(rows[a], cols[b]) - (a == b ? 1.0 : 0.0)));
  }
  return err;
}

}  // namespace

std::vector<std::optional<double>> observed_orders(const std::vector<double>& errors) {
  std::vector<std::optional<double>> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] < 1e-12 || errors[i] <= 0.0)
      out.push_back(std::nullopt);
    else
      out.push_back(std::log2(errors[i - 1] / errors[i]));
  }
  return out;
}

std::vector<ChartCheck> geometry_check(const DomainSpec& spec) {
  spec.validate();
  std::vector<ChartCheck> out;
  const int count = chart_count(spec);
  for (int w = 0; w < count; ++w) {
    const BoundaryChart c = boundary_chart(spec, w);
    ChartCheck r;
    r.index = w;
    r.sphere = c.shape() == BoundaryChart::Shape::Sphere;
    r.collar_depth = default_collar_depth(spec, c);
    const CoordinateMap map = coordinate_map(c, r.collar_depth);
    for (std::size_t p = 0; p < map.size(); ++p)
      r.jacobian = std::max(r.jacobian,
                            std::abs(map.J[p] - (map.A[p] * map.D[p] - map.B[p] * map.C[p])) / std::abs(map.J[p]));
    r.orthonormality = orthonormality(c);
    for (double h : {0.02, 0.01, 0.005}) {
      r.frenet_steps.push_back(h);
      r.frenet_errors.push_back(frenet_error(c, h));
    }
    for (int n : {9, 17, 33}) {
      const BoundaryChart cn = boundary_chart(spec, w, n, 2 * n - 1);
      r.chain_nodes.push_back(n);
      r.chain_rule_errors.push_back(chain_rule_error(coordinate_map(cn, r.collar_depth, n)));
    }
    const Vec3 k{0.7, -1.1, 0.4};
    r.commutator = commutator_residual(
        map.sample([&](const Vec3& x) { return std::sin(vdot(k, x) + 0.3); }), map);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nsp::cli
