#pragma once

#include <cstdint>
#include <string>

#include "nsp/domain.hpp"
#include "nsp/field.hpp"
#include "nsp/steady.hpp"

namespace nsp {

/// Perturbation (q, u, phi) of a steady state at time t, with the time
/// derivatives (q_t, u_t) evaluated from the equations.
struct PerturbationState {
  double t = 0.0;
  ScalarField q;
  VectorField u;
  ScalarField phi;
  ScalarField q_t;
  VectorField u_t;

  static PerturbationState zero(const Grid& grid);
};

struct SchemeParams {
  double dt = 1e-3;
  double mu = 1.0;
  double lambda = 0.0;
  double gamma = 5.0 / 3.0;
  double T = 1.0;
  int stride = 10;
  /// Drop every nonlinear term (f0, f) and use rho_tilde in place of rho.
  bool linearized = false;
  double cfl = 0.4;
  /// Weight beta of the odd-even correction in the mass flux,
  /// kappa = beta h_min / max sound speed; 0 disables it.
  double mass_smoothing = 0.25;

  /// Throws PreconditionViolated on inadmissible values.
  void validate() const;
};

struct NonlinearTerms {
  ScalarField f0;  ///< -div(q u)
  VectorField f;   ///< -rho (u.grad)u + q grad phi - grad h(q)
  ScalarField h;   ///< (q + rho~)^gamma - rho~^gamma - gamma rho~^(gamma-1) q
  ScalarField g0;  ///< -q div u
  VectorField g;   ///< -(u.grad)u + (1/rho - 1/rho~) Lame(u) + k
  VectorField k;   ///< -grad(H(rho) - H(rho~) - H'(rho~) q)
};

/// h(q) evaluated without cancellation for small q / rho~.
double pressure_remainder(double gamma, double rho_tilde, double q);
/// H(rho~ + q) - H(rho~) - H'(rho~) q, the bracket inside k.
double enthalpy_remainder(double gamma, double rho_tilde, double q);

NonlinearTerms nonlinear_terms(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                               const SchemeParams& params);

struct TimeDerivatives {
  ScalarField q_t;
  VectorField u_t;
};

/// q_t = -div((q + rho~) u) with pointwise stencils and
/// u_t = rho^-1 [Lame(u) - grad(gamma rho~^(gamma-1) q) + rho~ grad phi + q grad Phi~ + f],
/// with u_t = 0 on boundary nodes.
TimeDerivatives time_derivatives(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                                 const SchemeParams& params);

/// Stores fresh (q_t, u_t) in the state.
void refresh_time_derivatives(const Grid& grid, PerturbationState& s, const SteadyState& ss,
                              const SchemeParams& params);

/// Largest stable step under the CFL guard for the current velocity.
double cfl_limit(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                 const SchemeParams& params);

/// Completes an initial (q, u): projects q to mean zero, zeroes u on the
/// boundary, solves for phi and evaluates the time derivatives.
PerturbationState make_initial_state(const Grid& grid, ScalarField q, VectorField u,
                                     const SteadyState& ss, const SchemeParams& params,
                                     bool project_mean = true);

/// One IMEX step: explicit mass update (conservative flux of rho u plus the
/// odd-even correction kappa * compact_gradient_defect(gamma rho~^(gamma-1) q)), mean projection, Neumann solve for
/// phi, implicit viscous solve for u with the remaining momentum terms
/// explicit (evaluated at the new q and phi), boundary reset, refresh of
/// (q_t, u_t).
PerturbationState imex_step(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                            const SchemeParams& params);

/// Named initial-condition families.
struct InitialCondition {
  std::string family = "mode";  ///< mode | bump | random | array
  double amplitude = 1e-3;
  int wavenumber = 1;
  Vec3 centre{0.5, 0.5, 0.5};
  double width = 0.2;
  double velocity_amplitude = 0.0;
  std::uint64_t seed = 0;
  int random_modes = 4;
  ScalarField q_values;
  std::vector<ScalarField> u_values;
};

/// (q0, u0) for the chosen family; q0 is mean-zero and u0 vanishes on the boundary.
std::pair<ScalarField, VectorField> build_initial(const Grid& grid, const InitialCondition& ic);

}  // namespace nsp
