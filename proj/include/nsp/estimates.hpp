#pragma once

#include <map>
#include <string>

#include "nsp/evolve.hpp"

namespace nsp {

/// Measured ratio of a k = 0 a priori estimate; the constant is recorded, not asserted.
struct EstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::map<std::string, double> terms;  ///< each squared norm on either side
};

/// ||D^2 u||^2 against ||u_t||^2 + ||q u_t||^2 + ||grad q||^2 + ||q||^2 + ||grad phi||^2 + ||f||^2.
/// Throws DegenerateState when the right-hand side is below 1e-14.
EstimateReport verify_elliptic_estimate(const Grid& grid, const PerturbationState& s,
                                        const SteadyState& ss, const SchemeParams& params);

/// ||D^2 u||^2 + ||D(gamma rho~^(gamma-2) q - phi)||^2 against
/// ||dq/dt||_1^2 + ||u||_1^2 + ||g0||_1^2 + ||u_t||^2 + ||g||^2, where
/// dq/dt = g0 - div(rho~ u) is the material derivative of q.
/// Throws DegenerateState when the right-hand side is below 1e-14.
EstimateReport verify_stokes_estimate(const Grid& grid, const PerturbationState& s,
                                      const SteadyState& ss, const SchemeParams& params);

}  // namespace nsp
