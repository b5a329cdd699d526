#include "nsp/trajectory.hpp"

#include <cmath>

#include "nsp/energy.hpp"

namespace nsp {

double initial_size_sq(const Grid& grid, const PerturbationState& s) {
  return sobolev_norm_sq(grid, s.q, 3) + sobolev_norm_sq(grid, s.u, 3);
}

namespace {

StepRecord record(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                  const SchemeParams& params, std::size_t step) {
  const EnergyReport e = energy_functionals(grid, s);
  StepRecord r;
  r.step = step;
  r.t = s.t;
  r.E = e.E;
  r.D = e.D;
  r.mass_defect = std::abs(integrate(grid, s.q));
  r.cfl_margin = cfl_limit(grid, s, ss, params) / params.dt;
  return r;
}

}  // namespace

Trajectory run_trajectory(const Grid& grid, const PerturbationState& initial, const SteadyState& ss,
                          const SchemeParams& params, double delta, const StepObserver& observer) {
  params.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::PreconditionViolated, "delta must be positive");
  double mass = 0.0, abs_mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mass += grid.weight[i] * initial.q[i];
    abs_mass += grid.weight[i] * std::abs(initial.q[i]);
  }
  if (std::abs(mass) > 1e-10 * abs_mass)
    throw Error(ErrorKind::PreconditionViolated,
                "initial perturbation carries net mass " + std::to_string(mass));
  const double size = std::sqrt(initial_size_sq(grid, initial));
  if (size > delta)
    throw Error(ErrorKind::PreconditionViolated, "initial data of size " + std::to_string(size) +
                                                     " exceed delta = " + std::to_string(delta));

  const auto steps = static_cast<std::size_t>(std::ceil(params.T / params.dt - 1e-9));
  Trajectory tr;
  tr.records.push_back(record(grid, initial, ss, params, 0));
  tr.states.push_back(initial);
  tr.state_steps.push_back(0);

  PerturbationState cur = initial;
  for (std::size_t k = 1; k <= steps; ++k) {
    PerturbationState next;
    try {
      next = imex_step(grid, cur, ss, params);
      tr.records.push_back(record(grid, next, ss, params, k));
      if (!std::isfinite(tr.records.back().E))
        throw Error(ErrorKind::NoConvergence, "energy is no longer finite");
    } catch (const Error& e) {
      tr.failed_step = k;
      tr.failure_kind = e.kind();
      tr.failure = e.what();
      if (tr.state_steps.back() != k - 1) {
        tr.states.push_back(cur);
        tr.state_steps.push_back(k - 1);
      }
      return tr;
    }
    if (observer) observer(cur, next, k);
    cur = std::move(next);
    if (k % static_cast<std::size_t>(params.stride) == 0 || k == steps) {
      tr.states.push_back(cur);
      tr.state_steps.push_back(k);
    }
  }
  tr.completed = true;
  return tr;
}

}  // namespace nsp
