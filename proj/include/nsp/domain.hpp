#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nsp/field.hpp"

namespace nsp {

using Vec3 = std::array<double, 3>;

enum class DomainKind { Annulus, Box };

/// Geometry and resolution of the computational domain.
///
/// An annulus is the spherical shell R0 < |x| < R1; with the radial flag set
/// every field is a function of |x| only and the grid is one-dimensional in r.
/// A box is [0,L1]x[0,L2]x[0,L3]; an axis whose wall flag is false is treated
/// as periodic.
struct DomainSpec {
  DomainKind kind = DomainKind::Annulus;
  double r_inner = 1.0;
  double r_outer = 2.0;
  bool radial = true;
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  std::array<bool, 3> walls{true, true, true};
  std::array<int, 3> nodes{64, 1, 1};

  static DomainSpec annulus(double r_inner, double r_outer, int nodes, bool radial = true);
  static DomainSpec box(std::array<double, 3> lengths, std::array<int, 3> nodes,
                        std::array<bool, 3> walls = {true, true, true});

  /// Throws Error(InvalidSpec) when an invariant is violated.
  void validate() const;
};

struct Grid {
  DomainSpec spec;
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{0.0, 0.0, 0.0};
  std::vector<Vec3> coords;
  std::vector<std::uint8_t> boundary;  ///< 1 on boundary nodes, 0 in the interior
  std::vector<Vec3> normal;            ///< outward unit normal on boundary nodes, zero elsewhere
  ScalarField weight;                  ///< dual-cell volumes (quadrature weights)
  ScalarField boundary_area;           ///< surface quadrature weights on boundary nodes

  std::size_t size() const { return coords.size(); }
  bool radial() const { return spec.kind == DomainKind::Annulus; }
  /// Number of stored vector components (1 for the radial reduction).
  std::size_t ncomp() const { return radial() ? 1 : 3; }
  bool interior(std::size_t i) const { return boundary[i] == 0; }
  bool periodic(int axis) const { return !radial() && !spec.walls[axis]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * dims[1] + j) * dims[0] + i;
  }
  double radius(std::size_t i) const { return coords[i][0]; }
  /// Smallest active grid spacing.
  double h_min() const;
  /// Exact volume of the domain.
  double exact_volume() const;
  double volume() const;
};

Grid build_grid(const DomainSpec& spec);

/// Volume integral with the grid's quadrature weights.
double integrate(const Grid& grid, const ScalarField& f);
double mean(const Grid& grid, const ScalarField& f);
/// Surface integral over the boundary nodes.
double integrate_boundary(const Grid& grid, const ScalarField& g);
/// Weighted L2 inner product and norm.
double inner(const Grid& grid, const ScalarField& a, const ScalarField& b);
double inner(const Grid& grid, const VectorField& a, const VectorField& b);
double l2_norm(const Grid& grid, const ScalarField& f);
double l2_norm(const Grid& grid, const VectorField& u);
/// Subtracts the weighted mean so that the integral vanishes.
void remove_mean(const Grid& grid, ScalarField& f);

template <class F>
ScalarField sample(const Grid& grid, F&& fn) {
  ScalarField out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.coords[i]);
  return out;
}

}  // namespace nsp
