#include "nsp/elliptic.hpp"

#include <cmath>
#include <string>

#include "nsp/error.hpp"
#include "nsp/ops.hpp"

namespace nsp {

namespace {

constexpr double kTargetTol = 1e-13;
constexpr double kAcceptTol = 1e-10;
constexpr double kCompatibility = 1e-10;

double boundary_norm(const Grid& grid, const ScalarField& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += grid.boundary_area[i] * g[i] * g[i];
  return std::sqrt(s);
}

int iteration_cap(const Grid& grid) { return static_cast<int>(10 * grid.size()); }

}  // namespace

double neumann_defect(const Grid& grid, const NeumannProblem& p) {
  const double gi = p.g.empty() ? 0.0 : integrate_boundary(grid, p.g);
  return integrate(grid, p.f) - gi;
}

ScalarField solve_neumann_poisson(const Grid& grid, const NeumannProblem& p, SolveReport* report) {
  if (p.f.size() != grid.size() || (!p.g.empty() && p.g.size() != grid.size()))
    throw Error(ErrorKind::PreconditionViolated, "Neumann data do not match the grid");
  const double defect = neumann_defect(grid, p);
  const double scale = l2_norm(grid, p.f) + (p.g.empty() ? 0.0 : boundary_norm(grid, p.g)) + 1.0;
  if (std::abs(defect) > kCompatibility * scale)
    throw Error(ErrorKind::Incompatible,
                "int f - int g = " + std::to_string(defect) + " exceeds the compatibility tolerance");

  // -V L v = area g - V f, with f shifted so the right side sums to zero.
  const double shift = defect / grid.volume();
  ScalarField b(grid.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = -grid.weight[i] * (p.f[i] - shift);
    if (!p.g.empty()) b[i] += grid.boundary_area[i] * p.g[i];
  }
  ScalarField v(grid.size(), 0.0);
  const ScalarField diag = ops::poisson_diagonal(grid);
  const auto apply = [&](const ScalarField& x, ScalarField& y) { y = ops::poisson_apply(grid, x); };
  const SolveReport rep = pcg(apply, diag, b, v, kTargetTol, kAcceptTol, iteration_cap(grid));
  if (report) *report = rep;
  remove_mean(grid, v);
  return v;
}

double neumann_estimate_ratio(const Grid& grid, const ScalarField& v, const NeumannProblem& p) {
  const auto d = ops::derivative_sq(grid, v, 2);
  const double lhs = std::sqrt(integrate(grid, d[1]) + integrate(grid, d[2]));
  const double rhs = l2_norm(grid, p.f) + (p.g.empty() ? 0.0 : boundary_norm(grid, p.g));
  if (rhs < 1e-14) throw Error(ErrorKind::ZeroDenominator, "Neumann data vanish");
  return lhs / rhs;
}

void validate(const LameProblem& p) {
  if (!(p.mu > 0.0)) throw Error(ErrorKind::PreconditionViolated, "mu must be positive");
  if (!(p.lambda + 2.0 * p.mu / 3.0 >= 0.0))
    throw Error(ErrorKind::PreconditionViolated, "lambda + 2 mu / 3 must be nonnegative");
  for (double a : p.alpha)
    if (!(a > 0.0)) throw Error(ErrorKind::PreconditionViolated, "alpha must be positive");
  if (!(p.weight >= 0.0)) throw Error(ErrorKind::PreconditionViolated, "negative time-step weight");
}

VectorField apply_lame_problem(const Grid& grid, const LameProblem& p, const VectorField& u) {
  VectorField out = ops::lame(grid, u, p.mu, p.lambda);
  for (std::size_t k = 0; k < out.ncomp(); ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[k][i] = grid.boundary[i] ? u[k][i] : p.alpha[i] * u[k][i] - p.weight * out[k][i];
  return out;
}

VectorField solve_lame_dirichlet(const Grid& grid, const LameProblem& p, SolveReport* report) {
  validate(p);
  const std::size_t nc = grid.ncomp();
  const std::size_t n = grid.size();
  if (p.rhs.ncomp() != nc || p.rhs.size() != n || p.alpha.size() != n)
    throw Error(ErrorKind::PreconditionViolated, "Lame data do not match the grid");

  VectorField u(nc, n);
  if (p.weight == 0.0) {
    for (std::size_t k = 0; k < nc; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (!grid.boundary[i]) u[k][i] = p.rhs[k][i] / p.alpha[i];
    if (report) *report = {};
    return u;
  }

  // Symmetric form on the stacked components: (V alpha - w V lame) u = V rhs,
  // boundary rows reduced to the identity with zero right side.
  const VectorField ldiag = ops::lame_diagonal(grid, p.mu, p.lambda);
  ScalarField b(nc * n, 0.0), diag(nc * n, 1.0), x(nc * n, 0.0);
  for (std::size_t k = 0; k < nc; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (grid.boundary[i]) continue;
      b[k * n + i] = grid.weight[i] * p.rhs[k][i];
      diag[k * n + i] = grid.weight[i] * p.alpha[i] + p.weight * ldiag[k][i];
    }
  VectorField tmp(nc, n);
  const auto apply = [&](const ScalarField& xs, ScalarField& y) {
    for (std::size_t k = 0; k < nc; ++k)
      for (std::size_t i = 0; i < n; ++i) tmp[k][i] = xs[k * n + i];
    const VectorField l = ops::lame(grid, tmp, p.mu, p.lambda);
    y.resize(nc * n);
    for (std::size_t k = 0; k < nc; ++k)
      for (std::size_t i = 0; i < n; ++i)
        y[k * n + i] = grid.boundary[i]
                           ? xs[k * n + i]
                           : grid.weight[i] * (p.alpha[i] * xs[k * n + i] - p.weight * l[k][i]);
  };
  const SolveReport rep =
      pcg(apply, diag, b, x, kTargetTol, kAcceptTol, static_cast<int>(10 * nc * n));
  if (report) *report = rep;
  for (std::size_t k = 0; k < nc; ++k)
    for (std::size_t i = 0; i < n; ++i) u[k][i] = grid.boundary[i] ? 0.0 : x[k * n + i];
  return u;
}

}  // namespace nsp
