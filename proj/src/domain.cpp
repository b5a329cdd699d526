#include "nsp/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nsp/error.hpp"

namespace nsp {

namespace {

constexpr int kMinNodes = 8;
constexpr double kFourPi = 4.0 * std::numbers::pi;

double shell_volume(double a, double b) { return kFourPi / 3.0 * (b * b * b - a * a * a); }

// Dual-cell widths along one Cartesian axis.
std::vector<double> dual_widths(std::size_t n, double h, bool wall) {
  std::vector<double> w(n, h);
  if (wall) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

}  // namespace

DomainSpec DomainSpec::annulus(double r_inner, double r_outer, int nodes, bool radial) {
  DomainSpec s;
  s.kind = DomainKind::Annulus;
  s.r_inner = r_inner;
  s.r_outer = r_outer;
  s.radial = radial;
  s.nodes = {nodes, 1, 1};
  return s;
}

DomainSpec DomainSpec::box(std::array<double, 3> lengths, std::array<int, 3> nodes,
                           std::array<bool, 3> walls) {
  DomainSpec s;
  s.kind = DomainKind::Box;
  s.lengths = lengths;
  s.nodes = nodes;
  s.walls = walls;
  return s;
}

void DomainSpec::validate() const {
  if (kind == DomainKind::Annulus) {
    if (!(r_inner > 0.0)) throw Error(ErrorKind::InvalidSpec, "annulus needs R0 > 0");
    if (!(r_inner < r_outer)) throw Error(ErrorKind::InvalidSpec, "annulus needs R0 < R1");
    if (!radial)
      throw Error(ErrorKind::InvalidSpec,
                  "annulus grids are radially reduced; use a box for fully 3-D runs");
    if (nodes[0] < kMinNodes)
      throw Error(ErrorKind::InvalidSpec, "annulus needs at least 8 radial nodes");
    return;
  }
  for (int a = 0; a < 3; ++a) {
    if (!(lengths[a] > 0.0)) throw Error(ErrorKind::InvalidSpec, "box lengths must be positive");
    if (nodes[a] < kMinNodes)
      throw Error(ErrorKind::InvalidSpec, "box needs at least 8 nodes per axis");
  }
  if (!walls[0] && !walls[1] && !walls[2])
    throw Error(ErrorKind::InvalidSpec, "a fully periodic box has no boundary");
}

double Grid::h_min() const {
  if (radial()) return spacing[0];
  return std::min({spacing[0], spacing[1], spacing[2]});
}

double Grid::exact_volume() const {
  if (radial()) return shell_volume(spec.r_inner, spec.r_outer);
  return spec.lengths[0] * spec.lengths[1] * spec.lengths[2];
}

double Grid::volume() const {
  double v = 0.0;
  for (double w : weight) v += w;
  return v;
}

Grid build_grid(const DomainSpec& spec) {
  spec.validate();
  Grid g;
  g.spec = spec;

  if (spec.kind == DomainKind::Annulus) {
    const auto n = static_cast<std::size_t>(spec.nodes[0]);
    const double r0 = spec.r_inner;
    const double r1 = spec.r_outer;
    const double h = (r1 - r0) / static_cast<double>(n - 1);
    g.dims = {n, 1, 1};
    g.spacing = {h, 0.0, 0.0};
    g.coords.resize(n);
    g.boundary.assign(n, 0);
    g.normal.assign(n, Vec3{0.0, 0.0, 0.0});
    g.weight.resize(n);
    g.boundary_area.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      // The last node is pinned to R1 so the outer boundary is exact.
      const double r = (i + 1 == n) ? r1 : r0 + h * static_cast<double>(i);
      g.coords[i] = {r, 0.0, 0.0};
      const double lo = std::max(r0, r - 0.5 * h);
      const double hi = std::min(r1, r + 0.5 * h);
      g.weight[i] = shell_volume(lo, hi);
    }
    g.boundary.front() = 1;
    g.boundary.back() = 1;
    // Normals are stored in the radial frame: component 0 is the r-hat coefficient.
    g.normal.front() = {-1.0, 0.0, 0.0};
    g.normal.back() = {1.0, 0.0, 0.0};
    g.boundary_area.front() = kFourPi * r0 * r0;
    g.boundary_area.back() = kFourPi * r1 * r1;
    return g;
  }

  std::array<std::vector<double>, 3> widths;
  for (int a = 0; a < 3; ++a) {
    const auto n = static_cast<std::size_t>(spec.nodes[a]);
    g.dims[a] = n;
    const double L = spec.lengths[a];
    g.spacing[a] = spec.walls[a] ? L / static_cast<double>(n - 1) : L / static_cast<double>(n);
    widths[a] = dual_widths(n, g.spacing[a], spec.walls[a]);
  }
  const std::size_t total = g.dims[0] * g.dims[1] * g.dims[2];
  g.coords.resize(total);
  g.boundary.assign(total, 0);
  g.normal.assign(total, Vec3{0.0, 0.0, 0.0});
  g.weight.resize(total);
  g.boundary_area.assign(total, 0.0);
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        const std::array<std::size_t, 3> ijk{i, j, k};
        Vec3 x{};
        Vec3 nsum{0.0, 0.0, 0.0};
        double area = 0.0;
        for (int a = 0; a < 3; ++a) {
          x[a] = g.spacing[a] * static_cast<double>(ijk[a]);
          if (!spec.walls[a]) continue;
          const bool lo = ijk[a] == 0;
          const bool hi = ijk[a] + 1 == g.dims[a];
          if (lo || hi) {
            if (hi) x[a] = spec.lengths[a];
            nsum[a] += lo ? -1.0 : 1.0;
            const int b = (a + 1) % 3;
            const int c = (a + 2) % 3;
            area += widths[b][ijk[b]] * widths[c][ijk[c]];
          }
        }
        g.coords[idx] = x;
        g.weight[idx] = widths[0][i] * widths[1][j] * widths[2][k];
        const double nn = std::sqrt(nsum[0] * nsum[0] + nsum[1] * nsum[1] + nsum[2] * nsum[2]);
        if (nn > 0.0) {
          g.boundary[idx] = 1;
          g.normal[idx] = {nsum[0] / nn, nsum[1] / nn, nsum[2] / nn};
          g.boundary_area[idx] = area;
        }
      }
  return g;
}

double integrate(const Grid& grid, const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight[i] * f[i];
  return s;
}

double mean(const Grid& grid, const ScalarField& f) { return integrate(grid, f) / grid.volume(); }

double integrate_boundary(const Grid& grid, const ScalarField& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += grid.boundary_area[i] * g[i];
  return s;
}

double inner(const Grid& grid, const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += grid.weight[i] * a[i] * b[i];
  return s;
}

double inner(const Grid& grid, const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.ncomp(); ++k) s += inner(grid, a[k], b[k]);
  return s;
}

double l2_norm(const Grid& grid, const ScalarField& f) { return std::sqrt(inner(grid, f, f)); }

double l2_norm(const Grid& grid, const VectorField& u) { return std::sqrt(inner(grid, u, u)); }

void remove_mean(const Grid& grid, ScalarField& f) {
  const double m = mean(grid, f);
  for (double& v : f) v -= m;
}

}  // namespace nsp
