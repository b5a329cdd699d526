#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

namespace nsp::test {

/// Observed order from errors at successive halvings of the mesh size.
inline double observed_order(double coarse, double fine, double ratio = 2.0) {
  return std::log(coarse / fine) / std::log(ratio);
}

/// Minimal multivariate polynomial in (x, y, z), used as an exact oracle for
/// derivative tensors.
struct Poly {
  std::map<std::array<int, 3>, double> terms;

  Poly derivative(int axis) const {
    Poly out;
    for (const auto& [e, c] : terms) {
      if (e[axis] == 0) continue;
      auto f = e;
      --f[axis];
      out.terms[f] += c * e[axis];
    }
    return out;
  }

  double operator()(double x, double y, double z) const {
    double s = 0.0;
    for (const auto& [e, c] : terms) s += c * std::pow(x, e[0]) * std::pow(y, e[1]) * std::pow(z, e[2]);
    return s;
  }

  Poly operator*(const Poly& o) const {
    Poly out;
    for (const auto& [a, ca] : terms)
      for (const auto& [b, cb] : o.terms) out.terms[{a[0] + b[0], a[1] + b[1], a[2] + b[2]}] += ca * cb;
    return out;
  }
  Poly operator+(const Poly& o) const {
    Poly out = *this;
    for (const auto& [e, c] : o.terms) out.terms[e] += c;
    return out;
  }
  Poly scaled(double s) const {
    Poly out = *this;
    for (auto& [e, c] : out.terms) c *= s;
    return out;
  }
};

inline Poly r_squared() {
  Poly p;
  p.terms[{2, 0, 0}] = 1.0;
  p.terms[{0, 2, 0}] = 1.0;
  p.terms[{0, 0, 2}] = 1.0;
  return p;
}

/// |D^l p|^2 at a point: sum over all ordered index tuples of the squared
/// partial derivative.
inline double tensor_sq(const Poly& p, int l, double x, double y, double z) {
  if (l == 0) {
    const double v = p(x, y, z);
    return v * v;
  }
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += tensor_sq(p.derivative(a), l - 1, x, y, z);
  return s;
}

}  // namespace nsp::test
