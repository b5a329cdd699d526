#include "nsp/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nsp/elliptic.hpp"
#include "nsp/error.hpp"
#include "nsp/ops.hpp"

namespace nsp {

namespace {

// (1 + x)^a - 1 - a x, by its binomial series near 0.
double binomial_remainder(double a, double x) {
  if (std::abs(x) < 0.05) {
    double coef = a;
    double power = x;
    double sum = 0.0;
    for (int n = 2; n < 24; ++n) {
      coef *= (a - n + 1) / n;
      power *= x;
      const double term = coef * power;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(a * std::log1p(x)) - a * x;
}

void check_density(const ScalarField& q, const ScalarField& rho_tilde) {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!(q[i] + rho_tilde[i] > 0.0))
      throw Error(ErrorKind::NonpositiveDensity,
                  "density q + rho~ is not positive at node " + std::to_string(i));
}

ScalarField sound_potential(const ScalarField& q, const SteadyState& ss) {
  // gamma rho~^(gamma-1) q, the linear part of p(rho) - p(rho~).
  ScalarField P(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    P[i] = ss.gamma * std::pow(ss.rho[i], ss.gamma - 1.0) * q[i];
  return P;
}

void zero_boundary(const Grid& grid, VectorField& u) {
  for (auto& c : u.comp)
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.boundary[i]) c[i] = 0.0;
}

void check_gamma(const SteadyState& ss, const SchemeParams& params) {
  if (ss.gamma != params.gamma)
    throw Error(ErrorKind::PreconditionViolated, "scheme gamma differs from the steady state's");
}

}  // namespace

PerturbationState PerturbationState::zero(const Grid& grid) {
  PerturbationState s;
  s.q.assign(grid.size(), 0.0);
  s.u = VectorField(grid.ncomp(), grid.size());
  s.phi.assign(grid.size(), 0.0);
  s.q_t.assign(grid.size(), 0.0);
  s.u_t = VectorField(grid.ncomp(), grid.size());
  return s;
}

void SchemeParams::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::PreconditionViolated, "dt must be positive");
  if (!(mu > 0.0)) throw Error(ErrorKind::PreconditionViolated, "mu must be positive");
  if (!(lambda + 2.0 * mu / 3.0 >= 0.0))
    throw Error(ErrorKind::PreconditionViolated, "lambda + 2 mu / 3 must be nonnegative");
  if (!(gamma >= 1.0)) throw Error(ErrorKind::PreconditionViolated, "gamma must be at least 1");
  if (!(T >= 0.0)) throw Error(ErrorKind::PreconditionViolated, "end time must be nonnegative");
  if (stride < 1) throw Error(ErrorKind::PreconditionViolated, "stride must be positive");
  if (!(cfl > 0.0)) throw Error(ErrorKind::PreconditionViolated, "CFL factor must be positive");
  if (!(mass_smoothing >= 0.0))
    throw Error(ErrorKind::PreconditionViolated, "mass smoothing must be nonnegative");
}

double pressure_remainder(double gamma, double rho_tilde, double q) {
  return std::pow(rho_tilde, gamma) * binomial_remainder(gamma, q / rho_tilde);
}

double enthalpy_remainder(double gamma, double rho_tilde, double q) {
  const double x = q / rho_tilde;
  if (gamma == 1.0) {
    if (std::abs(x) < 0.05) {
      double sum = 0.0, power = x;
      for (int n = 2; n < 24; ++n) {
        power *= -x;
        const double term = -power / n;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      }
      return sum;
    }
    return std::log1p(x) - x;
  }
  return gamma / (gamma - 1.0) * std::pow(rho_tilde, gamma - 1.0) *
         binomial_remainder(gamma - 1.0, x);
}

NonlinearTerms nonlinear_terms(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                               const SchemeParams& params) {
  check_density(s.q, ss.rho);
  const std::size_t n = grid.size();
  const std::size_t nc = grid.ncomp();
  NonlinearTerms t;

  ScalarField rho(n), k_bracket(n);
  t.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = s.q[i] + ss.rho[i];
    t.h[i] = pressure_remainder(ss.gamma, ss.rho[i], s.q[i]);
    k_bracket[i] = enthalpy_remainder(ss.gamma, ss.rho[i], s.q[i]);
  }

  t.f0 = ops::divergence(grid, ops::times(s.q, s.u));
  for (double& v : t.f0) v = -v;

  const VectorField adv = ops::advect(grid, s.u, s.u);
  const VectorField gphi = ops::gradient(grid, s.phi);
  const VectorField gh = ops::gradient(grid, t.h);
  t.f = VectorField(nc, n);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i)
      t.f[c][i] = -rho[i] * adv[c][i] + s.q[i] * gphi[c][i] - gh[c][i];

  const ScalarField divu = ops::divergence(grid, s.u);
  t.g0.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.g0[i] = -s.q[i] * divu[i];

  t.k = ops::gradient(grid, k_bracket);
  for (auto& c : t.k.comp)
    for (double& v : c) v = -v;

  const VectorField lu = ops::lame(grid, s.u, params.mu, params.lambda);
  t.g = VectorField(nc, n);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i)
      t.g[c][i] = -adv[c][i] + (1.0 / rho[i] - 1.0 / ss.rho[i]) * lu[c][i] + t.k[c][i];
  return t;
}

TimeDerivatives time_derivatives(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                                 const SchemeParams& params) {
  check_gamma(ss, params);
  check_density(s.q, ss.rho);
  const std::size_t n = grid.size();
  const std::size_t nc = grid.ncomp();
  TimeDerivatives d;

  ScalarField rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = params.linearized ? ss.rho[i] : s.q[i] + ss.rho[i];

  // Pointwise divergence: the half cells at walls make the flux form only
  // first-order accurate there, which would pollute the higher norms of q_t.
  d.q_t = ops::divergence(grid, ops::times(rho, s.u));
  for (double& v : d.q_t) v = -v;

  const VectorField lu = ops::lame(grid, s.u, params.mu, params.lambda);
  const VectorField gP = ops::gradient(grid, sound_potential(s.q, ss));
  const VectorField gphi = ops::gradient(grid, s.phi);
  const VectorField gPhi = ops::gradient(grid, ss.Phi);
  VectorField f;
  if (!params.linearized) f = nonlinear_terms(grid, s, ss, params).f;
  d.u_t = VectorField(nc, n);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      if (grid.boundary[i]) continue;
      double rhs = lu[c][i] - gP[c][i] + ss.rho[i] * gphi[c][i] + s.q[i] * gPhi[c][i];
      if (!params.linearized) rhs += f[c][i];
      d.u_t[c][i] = rhs / rho[i];
    }
  return d;
}

void refresh_time_derivatives(const Grid& grid, PerturbationState& s, const SteadyState& ss,
                              const SchemeParams& params) {
  TimeDerivatives d = time_derivatives(grid, s, ss, params);
  s.q_t = std::move(d.q_t);
  s.u_t = std::move(d.u_t);
}

double cfl_limit(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                 const SchemeParams& params) {
  double speed = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double u2 = 0.0;
    for (const auto& c : s.u.comp) u2 += c[i] * c[i];
    const double sound = std::sqrt(ss.gamma * std::pow(ss.rho[i], ss.gamma - 1.0));
    speed = std::max(speed, std::sqrt(u2) + sound);
  }
  return params.cfl * grid.h_min() / speed;
}

PerturbationState make_initial_state(const Grid& grid, ScalarField q, VectorField u,
                                     const SteadyState& ss, const SchemeParams& params,
                                     bool project_mean) {
  if (q.size() != grid.size() || u.ncomp() != grid.ncomp() || u.size() != grid.size())
    throw Error(ErrorKind::PreconditionViolated, "initial fields do not match the grid");
  PerturbationState s;
  s.q = std::move(q);
  if (project_mean) remove_mean(grid, s.q);
  s.u = std::move(u);
  zero_boundary(grid, s.u);
  check_density(s.q, ss.rho);
  s.phi = solve_neumann_poisson(grid, {s.q, {}});
  refresh_time_derivatives(grid, s, ss, params);
  return s;
}

PerturbationState imex_step(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                            const SchemeParams& params) {
  params.validate();
  check_gamma(ss, params);
  const double dt = params.dt;
  const double limit = cfl_limit(grid, s, ss, params);
  if (dt > limit)
    throw Error(ErrorKind::CFLViolation,
                "dt = " + std::to_string(dt) + " exceeds the CFL limit " + std::to_string(limit));
  check_density(s.q, ss.rho);
  const std::size_t n = grid.size();
  const std::size_t nc = grid.ncomp();

  ScalarField rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = params.linearized ? ss.rho[i] : s.q[i] + ss.rho[i];

  PerturbationState next;
  next.t = s.t + dt;

  // (i)-(ii) explicit mass update and mean projection.
  ScalarField flux_div = ops::flux_divergence(grid, ops::times(rho, s.u));
  next.q = s.q;
  axpy(-dt, flux_div, next.q);
  if (params.mass_smoothing > 0.0) {
    double c_max = 0.0;
    for (double r : ss.rho) c_max = std::max(c_max, std::sqrt(ss.gamma * std::pow(r, ss.gamma - 1.0)));
    const double kappa = params.mass_smoothing * grid.h_min() / c_max;
    axpy(dt * kappa, ops::compact_gradient_defect(grid, sound_potential(s.q, ss)), next.q);
  }
  remove_mean(grid, next.q);
  check_density(next.q, ss.rho);

  // (iii) potential.
  next.phi = solve_neumann_poisson(grid, {next.q, {}});

  // (iv) momentum: rho^n (u' - u) / dt = Lame(u') + explicit terms at (q', phi').
  ScalarField P = sound_potential(next.q, ss);
  ScalarField rho_next(n);
  if (!params.linearized)
    for (std::size_t i = 0; i < n; ++i) {
      P[i] += pressure_remainder(ss.gamma, ss.rho[i], next.q[i]);
      rho_next[i] = ss.rho[i] + next.q[i];
    }
  const VectorField gP = ops::gradient(grid, P);
  const VectorField gphi = ops::gradient(grid, next.phi);
  const VectorField gPhi = ops::gradient(grid, ss.Phi);
  VectorField adv;
  if (!params.linearized) adv = ops::advect(grid, s.u, s.u);

  LameProblem lp;
  lp.alpha = rho;
  lp.mu = params.mu;
  lp.lambda = params.lambda;
  lp.weight = dt;
  lp.rhs = VectorField(nc, n);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      if (grid.boundary[i]) continue;
      double e = -gP[c][i] + next.q[i] * gPhi[c][i];
      if (params.linearized) {
        e += ss.rho[i] * gphi[c][i];
      } else {
        e += rho_next[i] * gphi[c][i] - rho[i] * adv[c][i];
      }
      lp.rhs[c][i] = rho[i] * s.u[c][i] + dt * e;
    }
  next.u = solve_lame_dirichlet(grid, lp);

  // (v)-(vi)
  zero_boundary(grid, next.u);
  refresh_time_derivatives(grid, next, ss, params);
  return next;
}

std::pair<ScalarField, VectorField> build_initial(const Grid& grid, const InitialCondition& ic) {
  constexpr double pi = std::numbers::pi;
  const std::size_t n = grid.size();
  const std::size_t nc = grid.ncomp();
  ScalarField q(n, 0.0);
  VectorField u(nc, n);

  // Smooth profile vanishing on the boundary, for velocities.
  const ScalarField bubble = sample(grid, [&](const Vec3& x) {
    if (grid.radial())
      return std::sin(pi * (x[0] - grid.spec.r_inner) / (grid.spec.r_outer - grid.spec.r_inner));
    double b = 1.0;
    for (int a = 0; a < 3; ++a)
      if (grid.spec.walls[a]) b *= std::sin(pi * x[a] / grid.spec.lengths[a]);
    return b;
  });

  if (ic.family == "mode") {
    q = mean_zero_mode(grid, ic.wavenumber);
    const double m = max_abs(q);
    for (double& v : q) v *= ic.amplitude / m;
    for (std::size_t c = 0; c < nc; ++c) u[c] = scaled(bubble, ic.velocity_amplitude);
  } else if (ic.family == "bump") {
    q = sample(grid, [&](const Vec3& x) {
      double d2 = 0.0;
      if (grid.radial()) {
        d2 = (x[0] - ic.centre[0]) * (x[0] - ic.centre[0]);
      } else {
        for (int a = 0; a < 3; ++a) d2 += (x[a] - ic.centre[a]) * (x[a] - ic.centre[a]);
      }
      return ic.amplitude * std::exp(-d2 / (ic.width * ic.width));
    });
    remove_mean(grid, q);
    for (std::size_t c = 0; c < nc; ++c) u[c] = scaled(bubble, ic.velocity_amplitude);
  } else if (ic.family == "random") {
    std::mt19937_64 rng(ic.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto random_field = [&]() {
      ScalarField f(n, 0.0);
      for (int j = 1; j <= ic.random_modes; ++j) {
        const double a = nd(rng) / (j * j);
        const double phase = nd(rng);
        std::array<double, 3> kvec{};
        if (grid.radial()) {
          kvec[0] = j * pi / (grid.spec.r_outer - grid.spec.r_inner);
        } else {
          for (int ax = 0; ax < 3; ++ax) {
            const double per = grid.spec.walls[ax] ? pi : 2.0 * pi;
            kvec[ax] = per * std::round(nd(rng) * j) / grid.spec.lengths[ax];
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          const auto& x = grid.coords[i];
          const double r0 = grid.radial() ? grid.spec.r_inner : 0.0;
          f[i] += a * std::cos(kvec[0] * (x[0] - r0) + kvec[1] * x[1] + kvec[2] * x[2] + phase);
        }
      }
      return f;
    };
    q = random_field();
    remove_mean(grid, q);
    const double m = max_abs(q);
    if (m > 0.0)
      for (double& v : q) v *= ic.amplitude / m;
    for (std::size_t c = 0; c < nc; ++c) {
      ScalarField w = random_field();
      const double mw = max_abs(w);
      for (std::size_t i = 0; i < n; ++i)
        u[c][i] = mw > 0.0 ? ic.velocity_amplitude * bubble[i] * w[i] / mw : 0.0;
    }
  } else if (ic.family == "array") {
    if (ic.q_values.size() != n)
      throw Error(ErrorKind::PreconditionViolated, "initial q array does not match the grid");
    q = ic.q_values;
    if (!ic.u_values.empty()) {
      if (ic.u_values.size() != nc)
        throw Error(ErrorKind::PreconditionViolated, "initial u array has the wrong component count");
      for (std::size_t c = 0; c < nc; ++c) {
        if (ic.u_values[c].size() != n)
          throw Error(ErrorKind::PreconditionViolated, "initial u array does not match the grid");
        u[c] = ic.u_values[c];
      }
    }
  } else {
    throw Error(ErrorKind::PreconditionViolated, "unknown initial-condition family " + ic.family);
  }
  zero_boundary(grid, u);
  return {std::move(q), std::move(u)};
}

}  // namespace nsp
