#include "nsp/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsp/error.hpp"
#include "nsp/fd.hpp"

namespace nsp {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 mul(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double vdot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double vnorm(const Vec3& a) { return std::sqrt(vdot(a, a)); }

Vec3 unit_axis(int a) {
  Vec3 e{0.0, 0.0, 0.0};
  e[a] = 1.0;
  return e;
}

}  // namespace

BoundaryChart BoundaryChart::sphere(double radius, bool outer, int polar_axis, int n_xi, int n_zeta) {
  BoundaryChart c;
  c.shape_ = Shape::Sphere;
  c.radius_ = radius;
  c.sign_ = outer ? 1.0 : -1.0;
  c.axis_ = polar_axis;
  c.rot_ = {unit_axis((polar_axis + 1) % 3), unit_axis((polar_axis + 2) % 3), unit_axis(polar_axis)};
  c.xi_min_ = radius * kBandLow;
  c.xi_max_ = radius * (kPi - kBandLow);
  c.zeta_min_ = 0.0;
  c.zeta_max_ = 2.0 * kPi;
  c.n_xi_ = n_xi;
  c.n_zeta_ = n_zeta;
  return c;
}

BoundaryChart BoundaryChart::plane(int axis, bool high_side, const std::array<double, 3>& lengths,
                                   int n_xi, int n_zeta) {
  BoundaryChart c;
  c.shape_ = Shape::Plane;
  c.axis_ = axis;
  c.sign_ = high_side ? 1.0 : -1.0;
  const int b = (axis + 1) % 3;
  const int d = (axis + 2) % 3;
  // Orientation e1 x e2 = n fixes which tangent comes first.
  const int first = high_side ? b : d;
  const int second = high_side ? d : b;
  c.t1_ = unit_axis(first);
  c.t2_ = unit_axis(second);
  c.normal_ = mul(c.sign_, unit_axis(axis));
  c.origin_ = {0.0, 0.0, 0.0};
  c.origin_[axis] = high_side ? lengths[axis] : 0.0;
  c.xi_min_ = 0.0;
  c.xi_max_ = lengths[first];
  c.zeta_min_ = 0.0;
  c.zeta_max_ = lengths[second];
  c.n_xi_ = n_xi;
  c.n_zeta_ = n_zeta;
  return c;
}

double BoundaryChart::xi_node(int i) const { return xi_min_ + d_xi() * i; }
double BoundaryChart::zeta_node(int j) const { return zeta_min_ + d_zeta() * j; }

namespace {

struct SphereLocal {
  Vec3 er, etheta, ephi;
  double theta;
};

SphereLocal sphere_local(double a, double sign, double xi, double zeta) {
  const double theta = xi / a;
  const double phi = sign * zeta;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}, theta};
}

}  // namespace

Vec3 BoundaryChart::point(double xi, double zeta) const {
  if (shape_ == Shape::Plane) return add(origin_, add(mul(xi, t1_), mul(zeta, t2_)));
  const auto loc = sphere_local(radius_, sign_, xi, zeta);
  Vec3 out{0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) out = add(out, mul(radius_ * loc.er[k], rot_[k]));
  return out;
}

Frame BoundaryChart::frame(double xi, double zeta) const {
  if (shape_ == Shape::Plane) return {t1_, t2_, normal_};
  const auto loc = sphere_local(radius_, sign_, xi, zeta);
  Frame f{};
  f.e1 = f.e2 = f.n = {0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    f.e1 = add(f.e1, mul(loc.etheta[k], rot_[k]));
    f.e2 = add(f.e2, mul(sign_ * loc.ephi[k], rot_[k]));
    f.n = add(f.n, mul(sign_ * loc.er[k], rot_[k]));
  }
  return f;
}

Vec3 BoundaryChart::z_xi(double xi, double zeta) const { return frame(xi, zeta).e1; }

double BoundaryChart::z_zeta_norm(double xi, double /*zeta*/) const {
  if (shape_ == Shape::Plane) return 1.0;
  return radius_ * std::sin(xi / radius_);
}

Vec3 BoundaryChart::z_zeta(double xi, double zeta) const {
  return mul(z_zeta_norm(xi, zeta), frame(xi, zeta).e2);
}

FrenetCoefficients BoundaryChart::frenet(double xi, double /*zeta*/) const {
  if (shape_ == Shape::Plane) return {};
  const double theta = xi / radius_;
  FrenetCoefficients m;
  m.m1 = sign_ / radius_;
  m.m2 = 0.0;
  m.m3 = 0.0;
  m.m1p = 0.0;
  m.m2p = sign_ * std::sin(theta);
  m.m3p = -std::cos(theta);
  return m;
}

double BoundaryChart::polar_angle(const Vec3& x) const {
  const double c = vdot(x, rot_[2]) / vnorm(x);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool BoundaryChart::covers(const Vec3& x) const {
  if (shape_ == Shape::Sphere) {
    const double th = polar_angle(x);
    return th >= kBandLow && th <= kPi - kBandLow;
  }
  const Vec3 rel = {x[0] - origin_[0], x[1] - origin_[1], x[2] - origin_[2]};
  const double s = vdot(rel, t1_);
  const double t = vdot(rel, t2_);
  const double eps = 1e-12;
  return s >= xi_min_ - eps && s <= xi_max_ + eps && t >= zeta_min_ - eps && t <= zeta_max_ + eps;
}

int chart_count(const DomainSpec& spec) {
  if (spec.kind == DomainKind::Annulus) return 4;
  int n = 0;
  for (bool w : spec.walls) n += w ? 2 : 0;
  return n;
}

BoundaryChart boundary_chart(const DomainSpec& spec, int which, int n_xi, int n_zeta) {
  if (spec.kind == DomainKind::Annulus) {
    if (which < 0 || which > 3) throw Error(ErrorKind::UnsupportedBoundary, "annulus has charts 0..3");
    const bool outer = which >= 2;
    const double a = outer ? spec.r_outer : spec.r_inner;
    const int axis = (which % 2 == 0) ? 2 : 0;
    return BoundaryChart::sphere(a, outer, axis, n_xi > 0 ? n_xi : 33, n_zeta > 0 ? n_zeta : 65);
  }
  if (which < 0 || which > 5) throw Error(ErrorKind::UnsupportedBoundary, "box has faces 0..5");
  const int axis = which / 2;
  if (!spec.walls[axis])
    throw Error(ErrorKind::UnsupportedBoundary, "periodic axis has no boundary face");
  return BoundaryChart::plane(axis, which % 2 == 1, spec.lengths, n_xi > 0 ? n_xi : 17,
                              n_zeta > 0 ? n_zeta : 17);
}

std::vector<BoundaryChart> boundary_charts(const DomainSpec& spec) {
  std::vector<BoundaryChart> out;
  if (spec.kind == DomainKind::Annulus) {
    for (int w = 0; w < 4; ++w) out.push_back(boundary_chart(spec, w));
    return out;
  }
  for (int w = 0; w < 6; ++w)
    if (spec.walls[w / 2]) out.push_back(boundary_chart(spec, w));
  return out;
}

namespace {

struct Metric {
  double A, B, C, D, J;
};

Metric metric_at(const BoundaryChart& chart, double xi, double zeta, double r) {
  const auto m = chart.frenet(xi, zeta);
  const double zz = chart.z_zeta_norm(xi, zeta);
  Metric g{};
  g.A = zz + m.m2p * r;
  g.B = -m.m1p * r;
  g.C = -m.m2 * r;
  g.D = 1.0 + m.m1 * r;
  g.J = g.A * g.D - g.B * g.C;
  return g;
}

double thickness(const DomainSpec& spec, const BoundaryChart& chart) {
  if (spec.kind == DomainKind::Annulus) return spec.r_outer - spec.r_inner;
  return spec.lengths[chart.polar_axis()];
}

}  // namespace

double default_collar_depth(const DomainSpec& spec, const BoundaryChart& chart) {
  const double cap = 0.25 * thickness(spec, chart);
  // Walk inward until J drops to 0.1 J(r=0) at some chart node.
  const int steps = 2000;
  const double dr = thickness(spec, chart) / steps;
  for (int s = 1; s <= steps; ++s) {
    const double r = -dr * s;
    if (-r > cap) break;
    for (int i = 0; i < chart.n_xi(); ++i)
      for (int j = 0; j < chart.n_zeta(); ++j) {
        const double xi = chart.xi_node(i), zeta = chart.zeta_node(j);
        const double j0 = metric_at(chart, xi, zeta, 0.0).J;
        if (metric_at(chart, xi, zeta, r).J <= 0.1 * j0) return dr * (s - 1);
      }
  }
  return cap;
}

CoordinateMap coordinate_map(const BoundaryChart& chart, double r_min, double r_max, int n_r) {
  if (n_r < 3 || !(r_max > r_min))
    throw Error(ErrorKind::InvalidSpec, "coordinate map needs r_max > r_min and at least 3 r nodes");
  CoordinateMap map;
  map.chart = chart;
  map.r_min = r_min;
  map.r_max = r_max;
  map.n_r = n_r;
  map.depth = std::max(-r_min, 0.0);
  const std::size_t total = static_cast<std::size_t>(chart.n_xi()) * chart.n_zeta() * n_r;
  map.A.resize(total);
  map.B.resize(total);
  map.C.resize(total);
  map.D.resize(total);
  map.J.resize(total);
  map.x.resize(total);
  map.xi_x.resize(total);
  map.zeta_x.resize(total);
  map.r_x.resize(total);
  for (int i = 0; i < chart.n_xi(); ++i)
    for (int j = 0; j < chart.n_zeta(); ++j) {
      const double xi = chart.xi_node(i), zeta = chart.zeta_node(j);
      const Frame f = chart.frame(xi, zeta);
      const Vec3 z = chart.point(xi, zeta);
      for (int k = 0; k < n_r; ++k) {
        const double r = map.r_node(k);
        const Metric g = metric_at(chart, xi, zeta, r);
        // Past a focal point J can be positive again with both factors negative.
        if (!(g.J > 0.0) || !(g.A > 0.0) || !(g.D > 0.0))
          throw Error(ErrorKind::DegenerateMap, "Jacobian is not positive on the requested collar");
        const std::size_t p = map.index(i, j, k);
        map.A[p] = g.A;
        map.B[p] = g.B;
        map.C[p] = g.C;
        map.D[p] = g.D;
        map.J[p] = g.J;
        map.x[p] = add(z, mul(r, f.n));
        map.xi_x[p] = mul(1.0 / g.J, add(mul(g.A, f.e1), mul(g.B, f.e2)));
        map.zeta_x[p] = mul(1.0 / g.J, add(mul(g.C, f.e1), mul(g.D, f.e2)));
        map.r_x[p] = f.n;
      }
    }
  return map;
}

CoordinateMap coordinate_map(const BoundaryChart& chart, double collar_depth, int n_r) {
  double depth = collar_depth;
  const double floor = 1e-9 * std::max(1.0, collar_depth);
  while (depth > floor) {
    bool regular = true;
    for (int i = 0; i < chart.n_xi() && regular; ++i)
      for (int j = 0; j < chart.n_zeta() && regular; ++j) {
        const double xi = chart.xi_node(i), zeta = chart.zeta_node(j);
        const double j0 = metric_at(chart, xi, zeta, 0.0).J;
        for (int k = 0; k < n_r; ++k) {
          const double r = -depth + depth * k / (n_r - 1);
          if (!(metric_at(chart, xi, zeta, r).J > 0.1 * j0)) {
            regular = false;
            break;
          }
        }
      }
    if (regular) {
      CoordinateMap map = coordinate_map(chart, -depth, 0.0, n_r);
      map.depth = depth;
      return map;
    }
    depth *= 0.5;
  }
  throw Error(ErrorKind::DegenerateMap, "no collar depth keeps the Jacobian positive");
}

ScalarField CoordinateMap::volume_weights() const {
  ScalarField w(size());
  const int ni = chart.n_xi(), nj = chart.n_zeta();
  auto trap = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
  const double cell = chart.d_xi() * chart.d_zeta() * d_r();
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < n_r; ++k) {
        const std::size_t p = index(i, j, k);
        w[p] = J[p] * cell * trap(i, ni) * trap(j, nj) * trap(k, n_r);
      }
  return w;
}

FrameDerivatives frame_derivatives(const ScalarField& field, const CoordinateMap& map) {
  if (field.size() != map.size())
    throw Error(ErrorKind::OutOfCollar, "field is not sampled on the collar nodes of this map");
  const int ni = map.chart.n_xi(), nj = map.chart.n_zeta(), nr = map.n_r;
  FrameDerivatives d{ScalarField(field.size()), ScalarField(field.size()), ScalarField(field.size())};
  const std::size_t s_i = static_cast<std::size_t>(nj) * nr;
  const std::size_t s_j = static_cast<std::size_t>(nr);
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < nr; ++k) {
      const std::size_t p = map.index(0, j, k);
      fd::derivative_line(field.data() + p, d.d_xi.data() + p, ni, s_i, map.chart.d_xi());
    }
  for (int i = 0; i < ni; ++i)
    for (int k = 0; k < nr; ++k) {
      const std::size_t p = map.index(i, 0, k);
      fd::derivative_line(field.data() + p, d.d_zeta.data() + p, nj, s_j, map.chart.d_zeta());
    }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const std::size_t p = map.index(i, j, 0);
      fd::derivative_line(field.data() + p, d.d_r.data() + p, nr, 1, map.d_r());
    }
  return d;
}

std::vector<Vec3> reconstruct_gradient(const FrameDerivatives& d, const CoordinateMap& map) {
  std::vector<Vec3> g(map.size());
  for (std::size_t p = 0; p < map.size(); ++p)
    g[p] = add(add(mul(d.d_xi[p], map.xi_x[p]), mul(d.d_zeta[p], map.zeta_x[p])),
               mul(d.d_r[p], map.r_x[p]));
  return g;
}

std::optional<double> commutator_residual(const ScalarField& field, const CoordinateMap& map) {
  const FrameDerivatives df = frame_derivatives(field, map);
  const auto grad = reconstruct_gradient(df, map);
  const ScalarField w = map.volume_weights();

  double grad_sq = 0.0;
  for (std::size_t p = 0; p < map.size(); ++p) grad_sq += w[p] * vdot(grad[p], grad[p]);
  if (std::sqrt(grad_sq) < 1e-14) return std::nullopt;

  // Cartesian components of grad f, each differentiated tangentially.
  std::array<FrameDerivatives, 3> dgrad;
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(map.size());
    for (std::size_t p = 0; p < map.size(); ++p) comp[p] = grad[p][c];
    dgrad[c] = frame_derivatives(comp, map);
  }
  const auto grad_of_dxi = reconstruct_gradient(frame_derivatives(df.d_xi, map), map);
  const auto grad_of_dzeta = reconstruct_gradient(frame_derivatives(df.d_zeta, map), map);

  double comm_sq = 0.0;
  for (std::size_t p = 0; p < map.size(); ++p)
    for (int c = 0; c < 3; ++c) {
      const double a = grad_of_dxi[p][c] - dgrad[c].d_xi[p];
      const double b = grad_of_dzeta[p][c] - dgrad[c].d_zeta[p];
      comm_sq += w[p] * (a * a + b * b);
    }
  return std::sqrt(comm_sq / grad_sq);
}

}  // namespace nsp
