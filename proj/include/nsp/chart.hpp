#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "nsp/domain.hpp"
#include "nsp/field.hpp"

namespace nsp {

struct Frame {
  Vec3 e1;  ///< z_xi (unit)
  Vec3 e2;  ///< z_zeta / |z_zeta|
  Vec3 n;   ///< external unit normal, e1 x e2 = n
};

/// Rotation coefficients of the boundary frame:
///   d/dxi   (e1,e2,n) = [[0,-m3,-m1],[m3,0,-m2],[m1,m2,0]] (e1,e2,n)
///   d/dzeta (e1,e2,n) = same with the primed coefficients.
struct FrenetCoefficients {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  double m1p = 0.0, m2p = 0.0, m3p = 0.0;
};

/// Analytic parametrisation z(xi, zeta) of one boundary patch, normalised so
/// that |z_xi| = 1 and z_xi . z_zeta = 0.
///
/// Spheres use arclength along a meridian for xi and the azimuth for zeta,
/// restricted to a polar-angle band that avoids the poles; two charts with
/// perpendicular polar axes cover a sphere. Box faces use Cartesian
/// coordinates of the face.
class BoundaryChart {
public:
  enum class Shape { Sphere, Plane };

  static BoundaryChart sphere(double radius, bool outer, int polar_axis, int n_xi = 33,
                              int n_zeta = 65);
  static BoundaryChart plane(int axis, bool high_side, const std::array<double, 3>& lengths,
                             int n_xi = 17, int n_zeta = 17);

  Shape shape() const { return shape_; }
  Vec3 point(double xi, double zeta) const;
  Vec3 z_xi(double xi, double zeta) const;
  Vec3 z_zeta(double xi, double zeta) const;
  double z_zeta_norm(double xi, double zeta) const;
  Frame frame(double xi, double zeta) const;
  FrenetCoefficients frenet(double xi, double zeta) const;

  double xi_min() const { return xi_min_; }
  double xi_max() const { return xi_max_; }
  double zeta_min() const { return zeta_min_; }
  double zeta_max() const { return zeta_max_; }
  int n_xi() const { return n_xi_; }
  int n_zeta() const { return n_zeta_; }
  double xi_node(int i) const;
  double zeta_node(int j) const;
  double d_xi() const { return (xi_max_ - xi_min_) / (n_xi_ - 1); }
  double d_zeta() const { return (zeta_max_ - zeta_min_) / (n_zeta_ - 1); }

  /// Sphere radius (plane charts return 0).
  double radius() const { return radius_; }
  /// +1 when the external normal points away from the sphere centre.
  double orientation() const { return sign_; }
  int polar_axis() const { return axis_; }
  bool high_side() const { return sign_ > 0.0; }

  /// Polar angle of the point x in this chart's spherical frame (sphere only).
  double polar_angle(const Vec3& x) const;
  /// True when x projects into the interior of the chart rectangle.
  bool covers(const Vec3& x) const;
  /// Polar-angle band on which this chart's cutoff is identically one.
  static constexpr double kBandLow = 0.5235987755982988;   // pi/6
  static constexpr double kCoreLow = 0.7853981633974483;   // pi/4

private:
  Shape shape_ = Shape::Plane;
  double radius_ = 0.0;
  double sign_ = 1.0;
  int axis_ = 2;
  std::array<Vec3, 3> rot_{};  // columns of the rotation from chart to global frame
  Vec3 origin_{};
  Vec3 t1_{}, t2_{}, normal_{};
  double xi_min_ = 0.0, xi_max_ = 1.0, zeta_min_ = 0.0, zeta_max_ = 1.0;
  int n_xi_ = 17, n_zeta_ = 17;
};

/// Number of analytic charts covering the boundary of the domain.
int chart_count(const DomainSpec& spec);
/// Chart `which` of the boundary: for an annulus 0,1 cover the inner sphere
/// and 2,3 the outer one; for a box chart 2*axis + side is a face.
BoundaryChart boundary_chart(const DomainSpec& spec, int which, int n_xi = 0, int n_zeta = 0);
std::vector<BoundaryChart> boundary_charts(const DomainSpec& spec);

/// Metric data of x = z(xi, zeta) + r n(xi, zeta) sampled on a tensor grid of
/// (xi, zeta, r) nodes. Node order is r fastest, then zeta, then xi.
struct CoordinateMap {
  BoundaryChart chart;
  double r_min = 0.0;
  double r_max = 0.0;
  int n_r = 0;
  double depth = 0.0;  ///< collar depth actually used
  std::vector<double> A, B, C, D, J;
  std::vector<Vec3> x, xi_x, zeta_x, r_x;

  std::size_t size() const { return J.size(); }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * chart.n_zeta() + j) * n_r + k;
  }
  double r_node(int k) const { return r_min + (r_max - r_min) * k / (n_r - 1); }
  double d_r() const { return (r_max - r_min) / (n_r - 1); }

  template <class F>
  ScalarField sample(F&& fn) const {
    ScalarField out(size());
    for (std::size_t p = 0; p < size(); ++p) out[p] = fn(x[p]);
    return out;
  }
  /// Trapezoidal volume weights J dxi dzeta dr.
  ScalarField volume_weights() const;
};

/// Default collar depth: min(0.25 * domain thickness, deepest r with J > 0.1 J(r=0)).
double default_collar_depth(const DomainSpec& spec, const BoundaryChart& chart);
/// Map on the interior collar r in [-depth, 0]; the depth is halved until J
/// stays above 0.1 J(r=0), and DegenerateMap is raised if that never happens.
CoordinateMap coordinate_map(const BoundaryChart& chart, double collar_depth, int n_r = 17);
/// Map on an explicit r range (J > 0 required everywhere).
CoordinateMap coordinate_map(const BoundaryChart& chart, double r_min, double r_max, int n_r);

struct FrameDerivatives {
  ScalarField d_xi, d_zeta, d_r;
};

/// Chart-coordinate derivatives of a field sampled on the map nodes.
FrameDerivatives frame_derivatives(const ScalarField& field, const CoordinateMap& map);
/// Cartesian gradient rebuilt from chart derivatives:
///   grad f = xi_x f_xi + zeta_x f_zeta + n f_r.
std::vector<Vec3> reconstruct_gradient(const FrameDerivatives& d, const CoordinateMap& map);

/// ||[d_{x_i}, d_bar] f|| / ||grad f|| over the collar; empty when the
/// gradient vanishes (not applicable).
std::optional<double> commutator_residual(const ScalarField& field, const CoordinateMap& map);

}  // namespace nsp
