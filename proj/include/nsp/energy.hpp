#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsp/chart.hpp"
#include "nsp/domain.hpp"
#include "nsp/evolve.hpp"
#include "nsp/field.hpp"
#include "nsp/steady.hpp"

namespace nsp {

/// (sum_{l<=m} ||D^l f||^2)^{1/2} with node-weight quadrature. Scalars allow
/// m <= 3, vectors m <= 4; the grid needs at least 4 m nodes per active axis.
double sobolev_norm(const Grid& grid, const ScalarField& f, int m);
double sobolev_norm(const Grid& grid, const VectorField& u, int m);
/// Squared versions, used when assembling E and D.
double sobolev_norm_sq(const Grid& grid, const ScalarField& f, int m);
double sobolev_norm_sq(const Grid& grid, const VectorField& u, int m);

struct EnergyReport {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  /// Squared norms keyed "q3", "u3", "grad_phi3", "q_t2", "u_t1" (E) and
  /// "u4", "u_t2" (D only).
  std::map<std::string, double> terms;
};

/// E = ||(q, u, grad phi)||_3^2 + ||q_t||_2^2 + ||u_t||_1^2,
/// D = ||(q, grad phi)||_3^2 + ||u||_4^2 + ||q_t||_2^2 + ||u_t||_2^2.
EnergyReport energy_functionals(const Grid& grid, const PerturbationState& s);

/// Smooth cutoffs chi_0 (interior) and chi_l (one per boundary chart),
/// normalised so that chi_0^2 + sum chi_l^2 = 1. Boundary cutoffs equal one
/// within `core_depth` of their boundary piece and vanish beyond
/// `support_depth`; on spheres they also fade out towards the chart's band edge.
class CutoffSystem {
public:
  /// support_depth <= 0 selects the default collar depth of each chart.
  CutoffSystem(const Grid& grid, double support_depth = 0.0, double core_fraction = 0.5);

  std::size_t chart_count() const { return charts_.size(); }
  const BoundaryChart& chart(std::size_t l) const { return charts_[l]; }
  const CoordinateMap& map(std::size_t l) const { return maps_[l]; }
  double support_depth() const { return support_; }
  double core_depth() const { return core_; }

  double chi0_sq(const Vec3& x) const;
  double chi_sq(std::size_t l, const Vec3& x) const;

  /// Per-node squared cutoffs on the grid. On a radial grid these are
  /// averages over the sphere through the node.
  const ScalarField& chi0_sq_nodes() const { return chi0_nodes_; }
  const ScalarField& chi_sq_nodes(std::size_t l) const { return chi_nodes_[l]; }

  /// min over the grid of chi_0^2 + sum_l chi_l^2.
  double floor() const { return floor_; }

private:
  double distance(std::size_t l, const Vec3& x) const;
  double boundary_profile(std::size_t l, const Vec3& x) const;
  double angular_sq(std::size_t l, const Vec3& x) const;
  double normaliser(const Vec3& x) const;

  const Grid* grid_;
  std::vector<BoundaryChart> charts_;
  std::vector<CoordinateMap> maps_;
  double support_ = 0.0;
  double core_ = 0.0;
  ScalarField chi0_nodes_;
  std::vector<ScalarField> chi_nodes_;
  double floor_ = 0.0;
};

/// Quintic smoothstep: 0 for s <= 0, 1 for s >= 1, C^2 at both ends.
double smoothstep5(double s);

struct ChartNorms {
  std::array<double, 3> tangential{};  ///< int chi^2 rho~^(g-2) |dbar^k q|^2, k = 1..3
  /// int chi^2 rho~^(g-4) |dbar^k d_r^m q_r|^2 keyed by (k, m), k + m <= 2.
  std::map<std::pair<int, int>, double> normal;
  /// First-order frame split on the grid: tangential and normal parts of
  /// int chi^2 w |Dq|^2 with w = rho~^(g-2) and rho~^(g-4).
  double frame_tangential = 0.0;
  double frame_normal = 0.0;
};

struct LocalizedReport {
  std::array<double, 3> interior{};  ///< int chi_0^2 rho~^(g-4) |D^k q|^2, k = 1..3
  std::vector<ChartNorms> charts;
  double global_first_order = 0.0;  ///< ||Dq||^2
  double first_order_sum = 0.0;     ///< interior[0] + sum of frame parts
  double lower_bound = 0.0;         ///< floor * min weight * ||Dq||^2
  double upper_bound = 0.0;         ///< max weight * ||Dq||^2
};

/// Throws ChartCoverage if a boundary cutoff reaches outside its chart.
LocalizedReport localized_norms(const Grid& grid, const ScalarField& q, const SteadyState& ss,
                                const CutoffSystem& cutoffs);

/// Values of a grid field interpolated (cubic Lagrange) at arbitrary points.
ScalarField interpolate(const Grid& grid, const ScalarField& f, const std::vector<Vec3>& points);

/// Basic energy: 1/2 int (rho |u|^2 + gamma rho~^(gamma-2) q^2) + 1/2 int |grad phi|^2.
double basic_energy(const Grid& grid, const PerturbationState& s, const SteadyState& ss);

/// |(Q(next) - Q(s)) / dt + dissipation(midpoint) - int A0(midpoint)| with
/// A0 = (q grad phi - grad h(q)) . u + (gamma rho~^(gamma-2) q - phi) f0.
double energy_identity_residual(const Grid& grid, const PerturbationState& s,
                                const PerturbationState& next, double dt, const SteadyState& ss,
                                const SchemeParams& params);

/// ||grad phi_t|| / ||grad u|| with Laplace phi_t = q_t.
/// Throws ZeroDenominator when ||grad u|| < 1e-14 (ratio not applicable).
double imp1_ratio(const Grid& grid, const PerturbationState& s);

struct DecayFit {
  double C = 0.0;
  double sigma = 0.0;
  double goodness = 0.0;
  std::size_t samples = 0;
  bool decaying = false;
};

/// Least-squares line through (t, log E) over t in [t_min, t_max].
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& E, double t_min,
                   double t_max);
/// Default window [0.2 T, T] with T the last sample time.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& E);

}  // namespace nsp
