#include "nsp/estimates.hpp"

#include <cmath>

#include "nsp/energy.hpp"
#include "nsp/error.hpp"
#include "nsp/ops.hpp"

namespace nsp {

namespace {

double d2_sq(const Grid& grid, const VectorField& u) {
  return integrate(grid, ops::derivative_sq(grid, u, 2)[2]);
}

double d1_sq(const Grid& grid, const ScalarField& f) {
  return integrate(grid, ops::derivative_sq(grid, f, 1)[1]);
}

EstimateReport finish(EstimateReport r, std::initializer_list<const char*> lhs,
                      std::initializer_list<const char*> rhs) {
  for (const char* k : lhs) r.lhs += r.terms.at(k);
  for (const char* k : rhs) r.rhs += r.terms.at(k);
  if (r.rhs < 1e-14)
    throw Error(ErrorKind::DegenerateState, "estimate right-hand side vanishes");
  r.ratio = r.lhs / r.rhs;
  return r;
}

}  // namespace

EstimateReport verify_elliptic_estimate(const Grid& grid, const PerturbationState& s,
                                        const SteadyState& ss, const SchemeParams& params) {
  const NonlinearTerms nl = nonlinear_terms(grid, s, ss, params);
  EstimateReport r;
  auto& t = r.terms;
  t["D2u"] = d2_sq(grid, s.u);
  t["u_t"] = sobolev_norm_sq(grid, s.u_t, 0);
  t["q_u_t"] = sobolev_norm_sq(grid, ops::times(s.q, s.u_t), 0);
  t["grad_q"] = d1_sq(grid, s.q);
  t["q"] = sobolev_norm_sq(grid, s.q, 0);
  t["grad_phi"] = d1_sq(grid, s.phi);
  t["f"] = sobolev_norm_sq(grid, nl.f, 0);
  return finish(std::move(r), {"D2u"}, {"u_t", "q_u_t", "grad_q", "q", "grad_phi", "f"});
}

EstimateReport verify_stokes_estimate(const Grid& grid, const PerturbationState& s,
                                      const SteadyState& ss, const SchemeParams& params) {
  const NonlinearTerms nl = nonlinear_terms(grid, s, ss, params);
  ScalarField dq = ops::divergence(grid, ops::times(ss.rho, s.u));
  for (std::size_t i = 0; i < grid.size(); ++i) dq[i] = nl.g0[i] - dq[i];
  ScalarField pot(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    pot[i] = ss.gamma * std::pow(ss.rho[i], ss.gamma - 2.0) * s.q[i] - s.phi[i];

  EstimateReport r;
  auto& t = r.terms;
  t["D2u"] = d2_sq(grid, s.u);
  t["D_potential"] = d1_sq(grid, pot);
  t["dq_dt_1"] = sobolev_norm_sq(grid, dq, 1);
  t["u_1"] = sobolev_norm_sq(grid, s.u, 1);
  t["g0_1"] = sobolev_norm_sq(grid, nl.g0, 1);
  t["u_t"] = sobolev_norm_sq(grid, s.u_t, 0);
  t["g"] = sobolev_norm_sq(grid, nl.g, 0);
  return finish(std::move(r), {"D2u", "D_potential"}, {"dq_dt_1", "u_1", "g0_1", "u_t", "g"});
}

}  // namespace nsp
