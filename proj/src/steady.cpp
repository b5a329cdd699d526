#include "nsp/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nsp/error.hpp"
#include "nsp/krylov.hpp"
#include "nsp/ops.hpp"

namespace nsp {

namespace {

constexpr int kMaxNewton = 60;
constexpr double kStepFloor = 1e-4;

}  // namespace

ScalarField mean_zero_mode(const Grid& grid, int k) {
  constexpr double pi = std::numbers::pi;
  ScalarField b;
  if (grid.radial()) {
    const double r0 = grid.spec.r_inner, r1 = grid.spec.r_outer;
    b = sample(grid, [&](const Vec3& x) { return std::cos(k * pi * (x[0] - r0) / (r1 - r0)); });
  } else {
    int axis = 0;
    while (!grid.spec.walls[axis]) ++axis;
    const double L = grid.spec.lengths[axis];
    b = sample(grid, [&](const Vec3& x) { return std::cos(k * pi * x[axis] / L); });
  }
  remove_mean(grid, b);
  return b;
}

BackgroundProfile BackgroundProfile::constant(const Grid& grid, double value) {
  return {ScalarField(grid.size(), value), "constant"};
}

BackgroundProfile BackgroundProfile::mode(const Grid& grid, double base, double eps, int k) {
  ScalarField b = mean_zero_mode(grid, k);
  for (double& v : b) v = base + eps * v;
  return {std::move(b), "mode"};
}

BackgroundProfile BackgroundProfile::bump(const Grid& grid, double base, double amp, Vec3 centre,
                                          double width) {
  ScalarField b = sample(grid, [&](const Vec3& x) {
    double d2 = 0.0;
    if (grid.radial()) {
      d2 = (x[0] - centre[0]) * (x[0] - centre[0]);
    } else {
      for (int a = 0; a < 3; ++a) d2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    }
    return base + amp * std::exp(-d2 / (width * width));
  });
  return {std::move(b), "bump"};
}

BackgroundProfile BackgroundProfile::array(ScalarField values) { return {std::move(values), "array"}; }

void BackgroundProfile::validate() const {
  if (rho_bar.empty()) throw Error(ErrorKind::PreconditionViolated, "empty background profile");
  for (double v : rho_bar)
    if (!(v > 0.0))
      throw Error(ErrorKind::PreconditionViolated, "background density must be positive");
}

double enthalpy(double gamma, double rho) {
  if (gamma == 1.0) return std::log(rho);
  return gamma / (gamma - 1.0) * std::pow(rho, gamma - 1.0);
}

double inverse_enthalpy(double gamma, double s) {
  if (gamma == 1.0) return std::exp(s);
  if (!(s > 0.0)) throw Error(ErrorKind::NonpositiveDensity, "enthalpy level below vacuum");
  return std::pow((gamma - 1.0) * s / gamma, 1.0 / (gamma - 1.0));
}

double inverse_enthalpy_derivative(double gamma, double s) {
  const double r = inverse_enthalpy(gamma, s);
  if (gamma == 1.0) return r;
  return std::pow(r, 2.0 - gamma) / gamma;
}

namespace {

// Weighted residual F = -V (L Phi - R(Phi + c) + rho_bar); throws
// NonpositiveDensity if the iterate leaves the admissible region.
ScalarField newton_residual(const Grid& grid, const ScalarField& phi, double c, double gamma,
                            const ScalarField& rho_bar) {
  ScalarField F = ops::poisson_apply(grid, phi);
  for (std::size_t i = 0; i < F.size(); ++i)
    F[i] += grid.weight[i] * (inverse_enthalpy(gamma, phi[i] + c) - rho_bar[i]);
  return F;
}

// Pointwise max of the unweighted residual L Phi - R + rho_bar.
double residual_max(const Grid& grid, const ScalarField& F) {
  double m = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) m = std::max(m, std::abs(F[i]) / grid.weight[i]);
  return m;
}

}  // namespace

SteadyState solve_steady(const BackgroundProfile& bg, double gamma, const Grid& grid,
                         const SteadyState* initial) {
  bg.validate();
  if (!(gamma >= 1.0)) throw Error(ErrorKind::PreconditionViolated, "gamma must be at least 1");
  if (bg.rho_bar.size() != grid.size())
    throw Error(ErrorKind::PreconditionViolated, "background does not match the grid");

  const double scale = 1.0 + max_abs(bg.rho_bar);
  const double tol = 1e-13 * scale;

  ScalarField phi(grid.size(), 0.0);
  double c = enthalpy(gamma, mean(grid, bg.rho_bar));
  if (initial != nullptr) {
    phi = initial->Phi;
    c = initial->c;
  }

  ScalarField F = newton_residual(grid, phi, c, gamma, bg.rho_bar);
  double fnorm = std::sqrt(dot(F, F));
  int it = 0;
  const ScalarField pdiag = ops::poisson_diagonal(grid);
  while (residual_max(grid, F) > tol) {
    if (it == kMaxNewton)
      throw Error(ErrorKind::NewtonDiverged, "Newton iteration cap reached with residual " +
                                                 std::to_string(residual_max(grid, F)));
    ScalarField jd(grid.size());
    ScalarField diag(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      jd[i] = grid.weight[i] * inverse_enthalpy_derivative(gamma, phi[i] + c);
      diag[i] = pdiag[i] + jd[i];
    }
    const auto apply = [&](const ScalarField& x, ScalarField& y) {
      y = ops::poisson_apply(grid, x);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += jd[i] * x[i];
    };
    ScalarField delta(grid.size(), 0.0);
    ScalarField minus_f = scaled(F, -1.0);
    pcg(apply, diag, minus_f, delta, 1e-14, 1e-8, static_cast<int>(10 * grid.size()));

    // Backtracking: halve until the residual norm decreases.
    double step = 1.0;
    bool positivity_failed = false;
    bool accepted = false;
    while (step >= kStepFloor) {
      ScalarField trial = phi;
      axpy(step, delta, trial);
      try {
        ScalarField Ft = newton_residual(grid, trial, c, gamma, bg.rho_bar);
        const double tn = std::sqrt(dot(Ft, Ft));
        if (tn < fnorm) {
          phi = std::move(trial);
          F = std::move(Ft);
          fnorm = tn;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonpositiveDensity) throw;
        positivity_failed = true;
      }
      step *= 0.5;
    }
    ++it;
    if (!accepted) {
      // Round-off floor: the residual cannot decrease further but is already tiny.
      if (!positivity_failed && residual_max(grid, F) <= 1e-10 * scale) break;
      if (positivity_failed)
        throw Error(ErrorKind::NonpositiveDensity, "damping could not keep the density positive");
      throw Error(ErrorKind::NewtonDiverged, "line search exhausted");
    }
  }

  // Mean-zero gauge: the constant moves into c.
  const double m = mean(grid, phi);
  SteadyState ss;
  ss.gamma = gamma;
  ss.c = c + m;
  ss.Phi = phi;
  for (double& v : ss.Phi) v -= m;
  ss.rho.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ss.rho[i] = inverse_enthalpy(gamma, ss.Phi[i] + ss.c);
  ss.newton_iterations = it;
  ss.residual = steady_residual(ss, bg, grid);
  return ss;
}

SteadyResidual steady_residual(const SteadyState& ss, const BackgroundProfile& bg, const Grid& grid) {
  SteadyResidual res;
  const std::size_t n = grid.size();
  const double g = ss.gamma;

  ScalarField h(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = enthalpy(g, ss.rho[i]) - ss.Phi[i];
    p[i] = std::pow(ss.rho[i], g);
    res.enthalpy = std::max(res.enthalpy, std::abs(h[i] - ss.c));
  }
  const VectorField gh = ops::gradient(grid, h);
  const VectorField gp = ops::gradient(grid, p);
  const VectorField gphi = ops::gradient(grid, ss.Phi);
  for (std::size_t k = 0; k < gh.ncomp(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      res.momentum = std::max(res.momentum, std::abs(ss.rho[i] * gh[k][i]));
      res.momentum_raw = std::max(res.momentum_raw, std::abs(gp[k][i] - ss.rho[i] * gphi[k][i]));
    }

  ScalarField src(n);
  for (std::size_t i = 0; i < n; ++i) src[i] = ss.rho[i] - bg.rho_bar[i];
  const ScalarField lap = ops::laplacian(grid, ss.Phi);
  for (std::size_t i = 0; i < n; ++i) res.poisson = std::max(res.poisson, std::abs(lap[i] - src[i]));
  res.mass = std::abs(integrate(grid, src));
  const ScalarField dn = ops::neumann_normal_derivative(grid, ss.Phi, src);
  res.neumann = max_abs(dn);
  return res;
}

}  // namespace nsp
