#pragma once

#include <string>

#include "nsp/domain.hpp"
#include "nsp/field.hpp"

namespace nsp {

/// Fixed background (ion) density rho_bar > 0.
struct BackgroundProfile {
  ScalarField rho_bar;
  std::string tag;

  static BackgroundProfile constant(const Grid& grid, double value);
  /// base + eps * b with b the lowest nonconstant mode of the grid, shifted to mean zero:
  /// cos(k pi (r - R0) / (R1 - R0)) on an annulus, a product of cosines along
  /// wall axes (sines/cosines along periodic axes) on a box.
  static BackgroundProfile mode(const Grid& grid, double base, double eps, int k = 1);
  /// base + amp * exp(-|x - centre|^2 / width^2); on an annulus the centre is a radius.
  static BackgroundProfile bump(const Grid& grid, double base, double amp, Vec3 centre, double width);
  static BackgroundProfile array(ScalarField values);

  /// Throws PreconditionViolated unless rho_bar > 0 everywhere.
  void validate() const;
};

/// Mean-zero mode used by BackgroundProfile::mode (and by initial conditions).
ScalarField mean_zero_mode(const Grid& grid, int k);

/// Enthalpy H(rho) = gamma/(gamma-1) rho^(gamma-1), or ln rho when gamma = 1.
double enthalpy(double gamma, double rho);
/// Inverse enthalpy R(s); throws NonpositiveDensity when s is outside its range.
double inverse_enthalpy(double gamma, double s);
double inverse_enthalpy_derivative(double gamma, double s);

struct SteadyResidual {
  double momentum = 0.0;      ///< max |rho grad(H(rho) - Phi)|, enthalpy form
  double momentum_raw = 0.0;  ///< max |grad p - rho grad Phi| with pointwise stencils (O(h^2))
  double poisson = 0.0;       ///< max |Laplace Phi - rho + rho_bar|
  double mass = 0.0;          ///< |int (rho - rho_bar)|
  double neumann = 0.0;       ///< max |dPhi/dnu| on the boundary (ghost-point form)
  double enthalpy = 0.0;      ///< max |H(rho) - Phi - c|
};

struct SteadyState {
  ScalarField rho;
  ScalarField Phi;
  double gamma = 1.0;
  double c = 0.0;
  SteadyResidual residual;
  int newton_iterations = 0;
};

/// Newton iteration with backtracking for Laplace Phi = R(Phi + c) - rho_bar
/// with homogeneous Neumann data, returned in the mean-zero gauge.
/// `initial` (optional) warm-starts Phi and c.
SteadyState solve_steady(const BackgroundProfile& bg, double gamma, const Grid& grid,
                         const SteadyState* initial = nullptr);

SteadyResidual steady_residual(const SteadyState& ss, const BackgroundProfile& bg, const Grid& grid);

}  // namespace nsp
