#include "nsp/ops.hpp"

#include "nsp/fd.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace nsp::ops {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::size_t stride_of(const Grid& g, int axis) {
  if (axis == 0) return 1;
  if (axis == 1) return g.dims[0];
  return g.dims[0] * g.dims[1];
}

// Calls fn(start) for the first node of every grid line along `axis`.
template <class Fn>
void for_each_line(const Grid& g, int axis, Fn&& fn) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  for (std::size_t jc = 0; jc < g.dims[c]; ++jc)
    for (std::size_t jb = 0; jb < g.dims[b]; ++jb) {
      std::array<std::size_t, 3> ijk{};
      ijk[axis] = 0;
      ijk[b] = jb;
      ijk[c] = jc;
      fn(g.index(ijk[0], ijk[1], ijk[2]));
    }
}

// Dual-cell width of node coordinate index `i` along a box axis.
double dual_width(const Grid& g, int axis, std::size_t i) {
  const double h = g.spacing[axis];
  if (g.periodic(axis)) return h;
  return (i == 0 || i + 1 == g.dims[axis]) ? 0.5 * h : h;
}

// Visits every interior face of the dual mesh: fn(p, q, area / h) for the
// face between nodes p and q (q is the +axis neighbour of p).
template <class Fn>
void for_each_face(const Grid& g, Fn&& fn) {
  if (g.radial()) {
    const double h = g.spacing[0];
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double rf = 0.5 * (g.radius(i) + g.radius(i + 1));
      fn(i, i + 1, kFourPi * rf * rf, h);
    }
    return;
  }
  for (int a = 0; a < 3; ++a) {
    const std::size_t n = g.dims[a];
    const std::size_t stride = stride_of(g, a);
    const double h = g.spacing[a];
    const bool per = g.periodic(a);
    for_each_line(g, a, [&](std::size_t start) {
      const std::size_t last = per ? n : n - 1;
      for (std::size_t i = 0; i < last; ++i) {
        const std::size_t p = start + i * stride;
        const std::size_t q = start + ((i + 1) % n) * stride;
        const double area = g.weight[p] / dual_width(g, a, i);
        fn(p, q, area, h);
      }
    });
  }
}

// Wall faces of the dual mesh: fn(node, area, axis_sign, axis).
template <class Fn>
void for_each_wall_face(const Grid& g, Fn&& fn) {
  if (g.radial()) {
    const std::size_t n = g.size();
    fn(std::size_t{0}, g.boundary_area[0], -1.0, 0);
    fn(n - 1, g.boundary_area[n - 1], 1.0, 0);
    return;
  }
  for (int a = 0; a < 3; ++a) {
    if (g.periodic(a)) continue;
    const std::size_t n = g.dims[a];
    const std::size_t stride = stride_of(g, a);
    for_each_line(g, a, [&](std::size_t start) {
      const double area_lo = g.weight[start] / dual_width(g, a, 0);
      const std::size_t end = start + (n - 1) * stride;
      const double area_hi = g.weight[end] / dual_width(g, a, n - 1);
      fn(start, area_lo, -1.0, a);
      fn(end, area_hi, 1.0, a);
    });
  }
}

ScalarField masked(const Grid& g, const ScalarField& f) {
  ScalarField out(f);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (g.boundary[i]) out[i] = 0.0;
  return out;
}

}  // namespace

ScalarField d_axis(const Grid& grid, const ScalarField& f, int axis) {
  ScalarField out(f.size(), 0.0);
  if (grid.radial()) {
    if (axis != 0) return out;
    fd::derivative_line(f.data(), out.data(), f.size(), 1, grid.spacing[0], false);
    return out;
  }
  const std::size_t stride = stride_of(grid, axis);
  for_each_line(grid, axis, [&](std::size_t start) {
    fd::derivative_line(f.data() + start, out.data() + start, grid.dims[axis], stride,
                    grid.spacing[axis], grid.periodic(axis));
  });
  return out;
}

VectorField gradient(const Grid& grid, const ScalarField& f) {
  VectorField g;
  for (std::size_t a = 0; a < grid.ncomp(); ++a)
    g.comp.push_back(d_axis(grid, f, static_cast<int>(a)));
  return g;
}

ScalarField divergence(const Grid& grid, const VectorField& u) {
  if (grid.radial()) {
    ScalarField out = d_axis(grid, u[0], 0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 * u[0][i] / grid.radius(i);
    return out;
  }
  ScalarField out(grid.size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    const ScalarField d = d_axis(grid, u[a], a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  }
  return out;
}

VectorField advect(const Grid& grid, const VectorField& u, const VectorField& v) {
  VectorField out(v.ncomp(), grid.size());
  for (std::size_t j = 0; j < v.ncomp(); ++j)
    for (std::size_t a = 0; a < u.ncomp(); ++a) {
      const ScalarField d = d_axis(grid, v[j], static_cast<int>(a));
      for (std::size_t i = 0; i < grid.size(); ++i) out[j][i] += u[a][i] * d[i];
    }
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.size(), 0.0);
  for (std::size_t k = 0; k < a.ncomp(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[k][i] * b[k][i];
  return out;
}

VectorField times(const ScalarField& s, const VectorField& u) {
  VectorField out(u);
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s[i];
  return out;
}

ScalarField flux_divergence(const Grid& grid, const VectorField& flux) {
  ScalarField out(grid.size(), 0.0);
  if (grid.radial()) {
    for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double) {
      const double f = area * 0.5 * (flux[0][p] + flux[0][q]);
      out[p] += f;
      out[q] -= f;
    });
  } else {
    for (int a = 0; a < 3; ++a) {
      const std::size_t n = grid.dims[a];
      const std::size_t stride = stride_of(grid, a);
      const bool per = grid.periodic(a);
      for_each_line(grid, a, [&](std::size_t start) {
        const std::size_t last = per ? n : n - 1;
        for (std::size_t i = 0; i < last; ++i) {
          const std::size_t p = start + i * stride;
          const std::size_t q = start + ((i + 1) % n) * stride;
          const double area = grid.weight[p] / dual_width(grid, a, i);
          const double f = area * 0.5 * (flux[a][p] + flux[a][q]);
          out[p] += f;
          out[q] -= f;
        }
      });
    }
  }
  for_each_wall_face(grid, [&](std::size_t p, double area, double sign, int a) {
    out[p] += sign * area * flux[grid.radial() ? 0 : a][p];
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= grid.weight[i];
  return out;
}

ScalarField compact_gradient_defect(const Grid& grid, const ScalarField& f) {
  ScalarField out(grid.size(), 0.0);
  if (grid.radial()) {
    const ScalarField G = d_axis(grid, f, 0);
    for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
      const double flux = area * ((f[q] - f[p]) / h - 0.5 * (G[p] + G[q]));
      out[p] += flux;
      out[q] -= flux;
    });
  } else {
    for (int a = 0; a < 3; ++a) {
      const ScalarField G = d_axis(grid, f, a);
      const std::size_t n = grid.dims[a];
      const std::size_t stride = stride_of(grid, a);
      const bool per = grid.periodic(a);
      const double h = grid.spacing[a];
      for_each_line(grid, a, [&](std::size_t start) {
        const std::size_t last = per ? n : n - 1;
        for (std::size_t i = 0; i < last; ++i) {
          const std::size_t p = start + i * stride;
          const std::size_t q = start + ((i + 1) % n) * stride;
          const double area = grid.weight[p] / dual_width(grid, a, i);
          const double flux = area * ((f[q] - f[p]) / h - 0.5 * (G[p] + G[q]));
          out[p] += flux;
          out[q] -= flux;
        }
      });
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= grid.weight[i];
  return out;
}

ScalarField laplacian(const Grid& grid, const ScalarField& f, const ScalarField* g) {
  ScalarField out(grid.size(), 0.0);
  for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
    const double flux = area * (f[q] - f[p]) / h;
    out[p] += flux;
    out[q] -= flux;
  });
  if (g != nullptr)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += grid.boundary_area[i] * (*g)[i];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= grid.weight[i];
  return out;
}

ScalarField poisson_apply(const Grid& grid, const ScalarField& f) {
  ScalarField out(grid.size(), 0.0);
  for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
    const double flux = area * (f[q] - f[p]) / h;
    out[p] -= flux;
    out[q] += flux;
  });
  return out;
}

ScalarField poisson_diagonal(const Grid& grid) {
  ScalarField out(grid.size(), 0.0);
  for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
    out[p] += area / h;
    out[q] += area / h;
  });
  return out;
}

double dirichlet_energy(const Grid& grid, const ScalarField& f) {
  double e = 0.0;
  for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
    const double d = f[q] - f[p];
    e += area * d * d / h;
  });
  return e;
}

ScalarField neumann_normal_derivative(const Grid& grid, const ScalarField& v, const ScalarField& f) {
  ScalarField flux(grid.size(), 0.0);
  for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
    const double fl = area * (v[q] - v[p]) / h;
    flux[p] += fl;
    flux[q] -= fl;
  });
  ScalarField out(grid.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (grid.boundary[i]) out[i] = (grid.weight[i] * f[i] - flux[i]) / grid.boundary_area[i];
  return out;
}

namespace {

// Radial Lame operator: (2 mu + lambda) d/dr div u in the symmetric form
// -V^{-1} D^T W D, with cell divergences D and cell weights W = 4 pi r_c^2 h.
void radial_lame(const Grid& g, const ScalarField& w, double coef, ScalarField& out) {
  const std::size_t n = g.size();
  const double h = g.spacing[0];
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ri = g.radius(i);
    const double rj = g.radius(i + 1);
    const double rc = 0.5 * (ri + rj);
    d[i] = (rj * rj * w[i + 1] - ri * ri * w[i]) / (h * rc * rc);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // W_c * dd_c/du_i = 4 pi r_i^2 * (+-1) for both adjacent cells.
    const double ri = g.radius(i);
    out[i] += coef * kFourPi * ri * ri * (d[i] - d[i - 1]) / g.weight[i];
  }
}

struct CellGeometry {
  std::array<std::size_t, 3> ncell;
};

CellGeometry cells_of(const Grid& g) {
  CellGeometry c{};
  for (int a = 0; a < 3; ++a) c.ncell[a] = g.periodic(a) ? g.dims[a] : g.dims[a] - 1;
  return c;
}

// Visits every primal cell of a box with its 8 corner node indices; corner
// bit a of the index gives the offset along axis a.
template <class Fn>
void for_each_cell(const Grid& g, Fn&& fn) {
  const auto cg = cells_of(g);
  for (std::size_t ck = 0; ck < cg.ncell[2]; ++ck)
    for (std::size_t cj = 0; cj < cg.ncell[1]; ++cj)
      for (std::size_t ci = 0; ci < cg.ncell[0]; ++ci) {
        std::array<std::size_t, 8> corner{};
        for (int o = 0; o < 8; ++o) {
          const std::size_t i = (ci + (o & 1)) % g.dims[0];
          const std::size_t j = (cj + ((o >> 1) & 1)) % g.dims[1];
          const std::size_t k = (ck + ((o >> 2) & 1)) % g.dims[2];
          corner[o] = g.index(i, j, k);
        }
        fn(corner);
      }
}

}  // namespace

VectorField lame(const Grid& grid, const VectorField& u, double mu, double lambda) {
  VectorField out(u.ncomp(), grid.size());
  if (grid.radial()) {
    radial_lame(grid, masked(grid, u[0]), 2.0 * mu + lambda, out[0]);
    return out;
  }
  VectorField um(u.ncomp(), 0);
  for (std::size_t k = 0; k < 3; ++k) um.comp[k] = masked(grid, u[k]);

  // mu * Laplacian, componentwise, Dirichlet through the masked values.
  for (std::size_t k = 0; k < 3; ++k)
    for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
      const double flux = mu * area * (um[k][q] - um[k][p]) / h;
      out[k][p] += flux / grid.weight[p];
      out[k][q] -= flux / grid.weight[q];
    });

  // (mu + lambda) grad div from cell-centred divergences.
  const double cellw = grid.spacing[0] * grid.spacing[1] * grid.spacing[2];
  const double coef = mu + lambda;
  for_each_cell(grid, [&](const std::array<std::size_t, 8>& corner) {
    double d = 0.0;
    for (int o = 0; o < 8; ++o)
      for (int a = 0; a < 3; ++a) {
        const double s = ((o >> a) & 1) ? 1.0 : -1.0;
        d += s * um[a][corner[o]] / (4.0 * grid.spacing[a]);
      }
    for (int o = 0; o < 8; ++o)
      for (int a = 0; a < 3; ++a) {
        const double s = ((o >> a) & 1) ? 1.0 : -1.0;
        out[a][corner[o]] -= coef * cellw * d * s / (4.0 * grid.spacing[a]) / grid.weight[corner[o]];
      }
  });
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.boundary[i]) out[k][i] = 0.0;
  return out;
}

VectorField lame_diagonal(const Grid& grid, double mu, double lambda) {
  VectorField diag(grid.ncomp(), grid.size());
  if (grid.radial()) {
    const double h = grid.spacing[0];
    const double coef = 2.0 * mu + lambda;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double ri = grid.radius(i);
      double s = 0.0;
      for (double rc : {0.5 * (ri + grid.radius(i - 1)), 0.5 * (ri + grid.radius(i + 1))}) {
        const double dd = ri * ri / (h * rc * rc);
        s += kFourPi * rc * rc * h * dd * dd;
      }
      diag[0][i] = coef * s;
    }
    return diag;
  }
  for (std::size_t k = 0; k < 3; ++k)
    for_each_face(grid, [&](std::size_t p, std::size_t q, double area, double h) {
      diag[k][p] += mu * area / h;
      diag[k][q] += mu * area / h;
    });
  const double cellw = grid.spacing[0] * grid.spacing[1] * grid.spacing[2];
  for_each_cell(grid, [&](const std::array<std::size_t, 8>& corner) {
    for (int o = 0; o < 8; ++o)
      for (int a = 0; a < 3; ++a) {
        const double c = 1.0 / (4.0 * grid.spacing[a]);
        diag[a][corner[o]] += (mu + lambda) * cellw * c * c;
      }
  });
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.boundary[i]) diag[k][i] = 0.0;
  return diag;
}

double viscous_dissipation(const Grid& grid, const VectorField& u, double mu, double lambda) {
  const VectorField lu = lame(grid, u, mu, lambda);
  double s = 0.0;
  for (std::size_t k = 0; k < u.ncomp(); ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!grid.boundary[i]) s -= grid.weight[i] * lu[k][i] * u[k][i];
  return s;
}

namespace {

// |D^l F|^2 for a radial function F(|x|) from its r-derivatives d[1..l].
double radial_tensor_sq(int l, const std::array<double, 6>& d, double r) {
  const double r2 = r * r;
  switch (l) {
    case 1:
      return d[1] * d[1];
    case 2:
      return d[2] * d[2] + 2.0 * d[1] * d[1] / r2;
    case 3:
      return d[3] * d[3] + 6.0 * d[2] * d[2] / r2 - 12.0 * d[1] * d[2] / (r2 * r) +
             6.0 * d[1] * d[1] / (r2 * r2);
    case 4: {
      const double r4 = r2 * r2;
      return d[4] * d[4] + 12.0 * d[3] * d[3] / r2 - 48.0 * d[2] * d[3] / (r2 * r) +
             72.0 * d[2] * d[2] / r4 + 48.0 * d[1] * d[3] / r4 -
             144.0 * d[1] * d[2] / (r4 * r) + 72.0 * d[1] * d[1] / (r4 * r2);
    }
    case 5: {
      const double r4 = r2 * r2;
      const double r6 = r4 * r2;
      return d[5] * d[5] + 20.0 * d[4] * d[4] / r2 - 120.0 * d[3] * d[4] / (r2 * r) +
             300.0 * d[3] * d[3] / r4 + 240.0 * d[2] * d[4] / r4 -
             1440.0 * d[2] * d[3] / (r4 * r) + 1800.0 * d[2] * d[2] / r6 -
             240.0 * d[1] * d[4] / (r4 * r) + 1440.0 * d[1] * d[3] / r6 -
             3600.0 * d[1] * d[2] / (r6 * r) + 1800.0 * d[1] * d[1] / (r6 * r2);
    }
    default:
      throw std::invalid_argument("radial tensor norms are available up to order 5");
  }
}

// Box: |D^l f|^2 = sum over multi-indices |alpha| = l of (l! / alpha!) (D^alpha f)^2.
std::vector<ScalarField> box_derivative_sq(const Grid& grid, const ScalarField& f, int max_order) {
  std::map<std::array<int, 3>, ScalarField> memo;
  memo[{0, 0, 0}] = f;
  std::vector<ScalarField> out(static_cast<std::size_t>(max_order) + 1,
                               ScalarField(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) out[0][i] = f[i] * f[i];
  auto factorial = [](int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  for (int l = 1; l <= max_order; ++l) {
    for (int a = l; a >= 0; --a)
      for (int b = l - a; b >= 0; --b) {
        const int c = l - a - b;
        const std::array<int, 3> alpha{a, b, c};
        int axis = 0;
        while (alpha[axis] == 0) ++axis;
        std::array<int, 3> parent = alpha;
        --parent[axis];
        const ScalarField d = d_axis(grid, memo.at(parent), axis);
        const double mult = factorial(l) / (factorial(a) * factorial(b) * factorial(c));
        for (std::size_t i = 0; i < grid.size(); ++i) out[l][i] += mult * d[i] * d[i];
        memo[alpha] = d;
      }
  }
  return out;
}

}  // namespace

std::vector<ScalarField> derivative_sq(const Grid& grid, const ScalarField& f, int max_order) {
  if (!grid.radial()) return box_derivative_sq(grid, f, max_order);
  if (max_order > 5) throw std::invalid_argument("radial tensor norms are available up to order 5");
  std::vector<ScalarField> d(static_cast<std::size_t>(max_order) + 1);
  d[0] = f;
  for (int j = 1; j <= max_order; ++j) d[j] = d_axis(grid, d[j - 1], 0);
  std::vector<ScalarField> out(d.size(), ScalarField(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[0][i] = f[i] * f[i];
    std::array<double, 6> di{};
    for (int j = 1; j <= max_order; ++j) di[j] = d[j][i];
    for (int l = 1; l <= max_order; ++l) out[l][i] = radial_tensor_sq(l, di, grid.radius(i));
  }
  return out;
}

std::vector<ScalarField> derivative_sq(const Grid& grid, const VectorField& u, int max_order) {
  if (!grid.radial()) {
    std::vector<ScalarField> out(static_cast<std::size_t>(max_order) + 1,
                                 ScalarField(grid.size(), 0.0));
    for (std::size_t k = 0; k < u.ncomp(); ++k) {
      const auto part = box_derivative_sq(grid, u[k], max_order);
      for (std::size_t l = 0; l < out.size(); ++l)
        for (std::size_t i = 0; i < grid.size(); ++i) out[l][i] += part[l][i];
    }
    return out;
  }
  if (max_order > 4) throw std::invalid_argument("radial vector norms are available up to order 4");
  // A radial field w(r) r-hat is the gradient of a potential F with F' = w, so
  // |D^l u| = |D^{l+1} F| and F's derivatives are w's shifted by one.
  std::vector<ScalarField> d(static_cast<std::size_t>(max_order) + 1);
  d[0] = u[0];
  for (int j = 1; j <= max_order; ++j) d[j] = d_axis(grid, d[j - 1], 0);
  std::vector<ScalarField> out(d.size(), ScalarField(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::array<double, 6> di{};
    for (int j = 0; j <= max_order; ++j) di[j + 1] = d[j][i];
    out[0][i] = u[0][i] * u[0][i];
    for (int l = 1; l <= max_order; ++l) out[l][i] = radial_tensor_sq(l + 1, di, grid.radius(i));
  }
  return out;
}

}  // namespace nsp::ops
