#pragma once

#include "nsp/domain.hpp"
#include "nsp/field.hpp"
#include "nsp/krylov.hpp"

namespace nsp {

/// Laplace v = f in the domain, dv/dnu = g on the boundary.
struct NeumannProblem {
  ScalarField f;
  ScalarField g;  ///< boundary datum on boundary nodes; empty means homogeneous
};

/// Mean-zero solution of the Neumann problem with the finite-volume
/// Laplacian. A compatibility defect below 1e-10 (||f|| + ||g|| + 1) is
/// removed by shifting f by a constant; larger defects raise Incompatible.
ScalarField solve_neumann_poisson(const Grid& grid, const NeumannProblem& p,
                                  SolveReport* report = nullptr);

/// Compatibility defect  int f dx - int g dS.
double neumann_defect(const Grid& grid, const NeumannProblem& p);

/// ||grad v||_1 / (||f||_0 + ||g||_{L2(boundary)}), the k = 0 elliptic ratio.
double neumann_estimate_ratio(const Grid& grid, const ScalarField& v, const NeumannProblem& p);

/// (alpha - w (mu Laplace + (mu + lambda) grad div)) u = rhs, u = 0 on the boundary.
struct LameProblem {
  ScalarField alpha;
  double mu = 1.0;
  double lambda = 0.0;
  VectorField rhs;
  double weight = 0.0;
};

/// Throws PreconditionViolated unless mu > 0, lambda + 2 mu / 3 >= 0, alpha > 0.
void validate(const LameProblem& p);

VectorField solve_lame_dirichlet(const Grid& grid, const LameProblem& p,
                                 SolveReport* report = nullptr);

/// Applies the Lame-problem operator to u (boundary rows return u itself).
VectorField apply_lame_problem(const Grid& grid, const LameProblem& p, const VectorField& u);

}  // namespace nsp
