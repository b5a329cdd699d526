#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsp/error.hpp"
#include "nsp/evolve.hpp"

namespace nsp {

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  double mass_defect = 0.0;  ///< |int q|
  double cfl_margin = 0.0;   ///< CFL limit / dt; below 1 means the step was refused
};

struct Trajectory {
  std::vector<StepRecord> records;  ///< one per step, starting with step 0
  std::vector<PerturbationState> states;  ///< states at stride points and the last state reached
  std::vector<std::size_t> state_steps;
  bool completed = false;
  std::optional<std::size_t> failed_step;
  std::optional<ErrorKind> failure_kind;
  std::string failure;
};

/// Called after every accepted step with the states before and after it.
using StepObserver =
    std::function<void(const PerturbationState& prev, const PerturbationState& next, std::size_t step)>;

/// ||q||_3^2 + ||u||_3^2, the smallness measure of an initial state.
double initial_size_sq(const Grid& grid, const PerturbationState& s);

/// Steps `initial` up to params.T. Throws PreconditionViolated when the
/// initial mass is not zero or the data exceed `delta`; errors raised while
/// stepping end the run and are reported in the returned trajectory.
Trajectory run_trajectory(const Grid& grid, const PerturbationState& initial, const SteadyState& ss,
                          const SchemeParams& params, double delta,
                          const StepObserver& observer = {});

}  // namespace nsp
