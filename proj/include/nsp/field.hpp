#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsp {

/// Node values of a scalar function on a grid, in the grid's node order.
using ScalarField = std::vector<double>;

/// Node values of a vector function. Radially reduced grids carry a single
/// component (the radial one); Cartesian boxes carry three.
struct VectorField {
  std::vector<ScalarField> comp;

  VectorField() = default;
  VectorField(std::size_t ncomp, std::size_t nodes) : comp(ncomp, ScalarField(nodes, 0.0)) {}

  std::size_t ncomp() const { return comp.size(); }
  std::size_t size() const { return comp.empty() ? 0 : comp.front().size(); }

  ScalarField& operator[](std::size_t k) { return comp[k]; }
  const ScalarField& operator[](std::size_t k) const { return comp[k]; }
};

// Small vector-space helpers shared by the solvers and diagnostics.
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
double max_abs(const VectorField& u);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
ScalarField scaled(const ScalarField& f, double alpha);
VectorField scaled(const VectorField& u, double alpha);
bool all_finite(std::span<const double> a);

}  // namespace nsp
