#include "nsp/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsp/error.hpp"

namespace nsp {

SolveReport pcg(const std::function<void(const ScalarField&, ScalarField&)>& apply,
                const ScalarField& diagonal, const ScalarField& b, ScalarField& x,
                double target_tol, double accept_tol, int max_iterations) {
  const std::size_t n = b.size();
  SolveReport rep;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    return rep;
  }
  ScalarField r(n), z(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  auto precondition = [&]() {
    for (std::size_t i = 0; i < n; ++i) z[i] = diagonal[i] > 0.0 ? r[i] / diagonal[i] : 0.0;
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  double rel = std::sqrt(dot(r, r)) / bnorm;
  // Round-off can stall the recurrence just short of the target; stop early
  // once no progress has been made for a while.
  double best = rel;
  int best_at = 0;
  const int patience = static_cast<int>(n) + 100;
  while (rel > target_tol && rep.iterations < max_iterations &&
         rep.iterations - best_at < patience) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    precondition();
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++rep.iterations;
    rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel < 0.5 * best) {
      best = rel;
      best_at = rep.iterations;
    }
  }
  apply(x, ap);
  double rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) rr += (b[i] - ap[i]) * (b[i] - ap[i]);
  rep.relative_residual = std::sqrt(rr) / bnorm;
  if (!(rep.relative_residual <= accept_tol))
    throw Error(ErrorKind::NoConvergence,
                "conjugate gradients stalled at relative residual " +
                    std::to_string(rep.relative_residual) + " after " +
                    std::to_string(rep.iterations) + " iterations");
  return rep;
}

}  // namespace nsp
