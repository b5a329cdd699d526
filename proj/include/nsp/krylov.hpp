#pragma once

#include <functional>

#include "nsp/field.hpp"

namespace nsp {

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// (semi)definite operator. Iterates towards `target_tol` and accepts
/// anything at or below `accept_tol` when the cap is reached; otherwise
/// throws Error(NoConvergence). `x` holds the initial guess on entry.
SolveReport pcg(const std::function<void(const ScalarField&, ScalarField&)>& apply,
                const ScalarField& diagonal, const ScalarField& b, ScalarField& x,
                double target_tol, double accept_tol, int max_iterations);

}  // namespace nsp
