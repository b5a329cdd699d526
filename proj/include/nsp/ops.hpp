#pragma once

#include <vector>

#include "nsp/domain.hpp"
#include "nsp/field.hpp"

/// Second-order finite-difference and finite-volume operators on a Grid.
///
/// Pointwise derivatives use central differences with one-sided second-order
/// closures at walls. Conservative operators (flux divergence, Neumann
/// Laplacian, Lame) are built on the node-centred dual cells whose volumes are
/// the grid quadrature weights, so that summation-by-parts holds exactly.
namespace nsp::ops {

ScalarField d_axis(const Grid& grid, const ScalarField& f, int axis);
VectorField gradient(const Grid& grid, const ScalarField& f);
ScalarField divergence(const Grid& grid, const VectorField& u);
/// (u . grad) v
VectorField advect(const Grid& grid, const VectorField& u, const VectorField& v);
/// Pointwise dot product of two vector fields.
ScalarField dot(const VectorField& a, const VectorField& b);
/// s * u (pointwise scalar times vector).
VectorField times(const ScalarField& s, const VectorField& u);

/// Conservative divergence: dual-cell face fluxes from face-averaged values,
/// wall faces use the boundary node value. The weighted sum of the result is
/// the boundary flux of F exactly.
ScalarField flux_divergence(const Grid& grid, const VectorField& flux);

/// Conservative divergence of the face values (f_q - f_p)/h - (G_p + G_q)/2,
/// G the pointwise gradient. O(h^2) on smooth f; on odd-even modes, which the
/// averaged gradient cannot see, it acts like the compact Laplacian.
/// No flux crosses walls.
ScalarField compact_gradient_defect(const Grid& grid, const ScalarField& f);

/// Finite-volume Laplacian with Neumann datum g (outward normal derivative) on
/// boundary nodes; g == nullptr means homogeneous.
ScalarField laplacian(const Grid& grid, const ScalarField& f, const ScalarField* g = nullptr);
/// -(V * laplacian) with homogeneous Neumann data: symmetric positive semidefinite.
ScalarField poisson_apply(const Grid& grid, const ScalarField& f);
ScalarField poisson_diagonal(const Grid& grid);
/// Discrete Dirichlet energy sum_faces A (df)^2 / h, the analogue of |grad f|^2 integrated.
double dirichlet_energy(const Grid& grid, const ScalarField& f);
/// Ghost-point normal derivative implied by the finite-volume balance
/// laplacian(v) = f on each boundary node; zero on interior nodes.
ScalarField neumann_normal_derivative(const Grid& grid, const ScalarField& v, const ScalarField& f);

/// mu * Laplacian(u) + (mu + lambda) * grad div u with u = 0 on the boundary.
/// Boundary-node values of u are ignored and boundary rows of the result are zero.
VectorField lame(const Grid& grid, const VectorField& u, double mu, double lambda);
/// Diagonal of -(V * lame), per component and node (zero on boundary nodes).
VectorField lame_diagonal(const Grid& grid, double mu, double lambda);
/// -<lame(u), u>, the discrete form of the viscous dissipation
/// integral of mu |grad u|^2 + (mu + lambda) |div u|^2.
double viscous_dissipation(const Grid& grid, const VectorField& u, double mu, double lambda);

/// Pointwise squared Frobenius norms |D^l f|^2 for l = 0..max_order.
std::vector<ScalarField> derivative_sq(const Grid& grid, const ScalarField& f, int max_order);
std::vector<ScalarField> derivative_sq(const Grid& grid, const VectorField& u, int max_order);

}  // namespace nsp::ops
