#include "nsp/field.hpp"

#include <algorithm>
#include <cmath>

namespace nsp {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const VectorField& u) {
  double m = 0.0;
  for (const auto& c : u.comp) m = std::max(m, max_abs(c));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

ScalarField scaled(const ScalarField& f, double alpha) {
  ScalarField out(f);
  for (double& v : out) v *= alpha;
  return out;
}

VectorField scaled(const VectorField& u, double alpha) {
  VectorField out(u);
  for (auto& c : out.comp)
    for (double& v : c) v *= alpha;
  return out;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace nsp
