#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "geometry.hpp"
#include "nsp/energy.hpp"
#include "nsp/error.hpp"
#include "nsp/estimates.hpp"
#include "nsp/steady.hpp"
#include "nsp/trajectory.hpp"
#include "report.hpp"

namespace nsp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Run failure that still carries the partial outputs already written.
struct RunFailure {
  ErrorKind kind;
  std::string message;
  json detail;
};

json optional_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_orders(const std::vector<double>& errors) {
  json out = json::array();
  for (const auto& o : observed_orders(errors)) out.push_back(o ? json(*o) : json(nullptr));
  return out;
}

BackgroundProfile make_background(const Grid& grid, const BackgroundConfig& b) {
  BackgroundProfile bg;
  if (b.profile == "constant")
    bg = BackgroundProfile::constant(grid, b.base);
  else if (b.profile == "mode")
    bg = BackgroundProfile::mode(grid, b.base, b.amplitude, b.wavenumber);
  else
    bg = BackgroundProfile::bump(grid, b.base, b.amplitude, b.centre, b.width);
  try {
    bg.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, std::string("background: ") + e.what());
  }
  return bg;
}

PerturbationState make_state(const Grid& grid, const SteadyState& ss, const RunConfig& c,
                             const InitialCondition& ic) {
  if (ic.family == "zero") return make_initial_state(grid, ScalarField(grid.size(), 0.0),
                                                     VectorField(grid.ncomp(), grid.size()), ss, c.scheme);
  auto [q, u] = build_initial(grid, ic);
  return make_initial_state(grid, std::move(q), std::move(u), ss, c.scheme);
}

json residual_json(const SteadyResidual& r) {
  return {{"momentum", r.momentum}, {"momentum_raw", r.momentum_raw}, {"poisson", r.poisson},
          {"mass", r.mass},         {"neumann", r.neumann},           {"enthalpy", r.enthalpy}};
}

json steady_json(const SteadyState& ss) {
  const auto [lo, hi] = std::minmax_element(ss.rho.begin(), ss.rho.end());
  return {{"newton_iterations", ss.newton_iterations},
          {"enthalpy_constant", ss.c},
          {"rho_min", *lo},
          {"rho_max", *hi},
          {"residual", residual_json(ss.residual)}};
}

json energy_json(const Grid& grid, const PerturbationState& s, const SteadyState& ss) {
  const EnergyReport r = energy_functionals(grid, s);
  json terms = json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  return {{"t", s.t}, {"E", r.E}, {"D", r.D}, {"basic_energy", basic_energy(grid, s, ss)}, {"terms", terms}};
}

double imp1_or_nan(const Grid& grid, const PerturbationState& s) {
  try {
    return imp1_ratio(grid, s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ZeroDenominator) return kNaN;
    throw;
  }
}

template <class F>
double estimate_or_nan(F&& verify) {
  try {
    return verify().ratio;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateState) return kNaN;
    throw;
  }
}

double nan_max(double a, double b) {
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  return std::max(a, b);
}

void write_fields(const RunConfig& c, std::size_t index, const ScalarField& values) {
  if (c.write_fields) write_atomic(fields_path(c.out_dir, index), fields_blob(values));
}

json run_steady(const RunConfig& c) {
  const Grid grid = build_grid(c.domain);
  const BackgroundProfile bg = make_background(grid, c.background);
  const SteadyState ss = solve_steady(bg, c.gamma, grid);
  write_fields(c, 0, ss.rho);
  write_fields(c, 1, ss.Phi);
  return {{"steady", steady_json(ss)}};
}

json run_evolve(const RunConfig& c, bool fit_required) {
  const Grid grid = build_grid(c.domain);
  const BackgroundProfile bg = make_background(grid, c.background);
  const SteadyState ss = solve_steady(bg, c.gamma, grid);
  const PerturbationState initial = make_state(grid, ss, c, c.initial);
  const SchemeParams& p = c.scheme;
  const auto stride = static_cast<std::size_t>(p.stride);
  const auto steps = static_cast<std::size_t>(std::ceil(p.T / p.dt - 1e-9));

  std::map<std::size_t, double> residual;
  const Trajectory tr = run_trajectory(
      grid, initial, ss, p, c.delta,
      [&](const PerturbationState& prev, const PerturbationState& next, std::size_t k) {
        if (k % stride == 0 || k == steps)
          residual[k] = energy_identity_residual(grid, prev, next, p.dt, ss, p);
      });

  double imp1_max = kNaN, elliptic_max = kNaN, stokes_max = kNaN, residual_max = kNaN;
  std::vector<SeriesRow> rows;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const std::size_t k = tr.state_steps[i];
    const PerturbationState& s = tr.states[i];
    const StepRecord& rec = tr.records[k];
    SeriesRow row{rec.t, rec.E, rec.D, rec.mass_defect, imp1_or_nan(grid, s), kNaN};
    if (auto it = residual.find(k); it != residual.end()) row.identity_residual = it->second;
    rows.push_back(row);
    imp1_max = nan_max(imp1_max, row.imp1_ratio);
    residual_max = nan_max(residual_max, row.identity_residual);
    elliptic_max =
        nan_max(elliptic_max, estimate_or_nan([&] { return verify_elliptic_estimate(grid, s, ss, p); }));
    stokes_max = nan_max(stokes_max, estimate_or_nan([&] { return verify_stokes_estimate(grid, s, ss, p); }));
    write_fields(c, i, s.q);
  }
  write_atomic(c.out_dir / "series.csv", series_csv(rows));

  const std::size_t last = tr.state_steps.back();
  std::vector<double> t, E;
  double e_over_d = kNaN;
  for (std::size_t k = 0; k <= last; ++k) {
    t.push_back(tr.records[k].t);
    E.push_back(tr.records[k].E);
    if (tr.records[k].D > 0.0) e_over_d = nan_max(e_over_d, tr.records[k].E / tr.records[k].D);
  }

  json summary;
  summary["steady"] = steady_json(ss);
  summary["completed"] = tr.completed;
  summary["steps"] = last;
  summary["initial_size"] = std::sqrt(initial_size_sq(grid, initial));
  summary["energy_breakdown"] = {{"initial", energy_json(grid, tr.states.front(), ss)},
                                 {"final", energy_json(grid, tr.states.back(), ss)}};
  summary["constants"] = {{"imp1_ratio_max", optional_number(imp1_max)},
                          {"E_over_D_max", optional_number(e_over_d)},
                          {"elliptic_ratio_max", optional_number(elliptic_max)},
                          {"stokes_ratio_max", optional_number(stokes_max)},
                          {"identity_residual_max", optional_number(residual_max)}};

  std::optional<RunFailure> failure;
  try {
    const double t_min = c.fit_t_min.value_or(0.2 * t.back());
    const double t_max = c.fit_t_max.value_or(t.back());
    const DecayFit f = decay_fit(t, E, t_min, t_max);
    summary["fit"] = {{"C", f.C},
                      {"sigma", f.sigma},
                      {"goodness", f.goodness},
                      {"samples", f.samples},
                      {"decaying", f.decaying},
                      {"window", {t_min, t_max}}};
  } catch (const Error& e) {
    summary["fit"] = nullptr;
    summary["fit_error"] = e.what();
    if (fit_required) failure = RunFailure{e.kind(), e.what(), json::object()};
  }

  if (!tr.completed) {
    const json detail = {{"failed_step", *tr.failed_step},
                         {"t", tr.records[last].t + p.dt},
                         {"last_completed_step", last}};
    summary["failure"] = {{"kind", std::string(to_string(*tr.failure_kind))},
                          {"message", tr.failure},
                          {"detail", detail}};
    failure = RunFailure{*tr.failure_kind, tr.failure, detail};
  }
  if (failure) {
    summary["experiment"] = c.experiment;
    summary["config"] = echo(c);
    write_json(c.out_dir / "summary.json", summary);
    throw *failure;
  }
  return summary;
}

json run_verify(const RunConfig& c) {
  const Grid grid = build_grid(c.domain);
  const BackgroundProfile bg = make_background(grid, c.background);
  const SteadyState ss = solve_steady(bg, c.gamma, grid);
  std::string csv = "sample,seed,elliptic_ratio,stokes_ratio,imp1_ratio\n";
  double emax = kNaN, smax = kNaN, imax = kNaN;
  for (int i = 0; i < c.verify_samples; ++i) {
    InitialCondition ic = c.initial;
    ic.seed = c.seed + static_cast<std::uint64_t>(i);
    const PerturbationState s = make_state(grid, ss, c, ic);
    const double e = estimate_or_nan([&] { return verify_elliptic_estimate(grid, s, ss, c.scheme); });
    const double st = estimate_or_nan([&] { return verify_stokes_estimate(grid, s, ss, c.scheme); });
    const double im = imp1_or_nan(grid, s);
    emax = nan_max(emax, e);
    smax = nan_max(smax, st);
    imax = nan_max(imax, im);
    csv += std::to_string(i) + ',' + std::to_string(ic.seed) + ',' + format_double(e) + ',' +
           format_double(st) + ',' + format_double(im) + '\n';
  }
  write_atomic(c.out_dir / "samples.csv", csv);
  return {{"steady", steady_json(ss)},
          {"samples", c.verify_samples},
          {"constants",
           {{"elliptic_ratio_max", optional_number(emax)},
            {"stokes_ratio_max", optional_number(smax)},
            {"imp1_ratio_max", optional_number(imax)}}}};
}

json run_geometry(const RunConfig& c) {
  json charts = json::array();
  for (const ChartCheck& r : geometry_check(c.domain)) {
    charts.push_back({{"chart", r.index},
                      {"shape", r.sphere ? "sphere" : "plane"},
                      {"collar_depth", r.collar_depth},
                      {"jacobian_identity", r.jacobian},
                      {"frame_orthonormality", r.orthonormality},
                      {"frenet", {{"steps", r.frenet_steps},
                                  {"errors", r.frenet_errors},
                                  {"orders", optional_orders(r.frenet_errors)}}},
                      {"chain_rule", {{"nodes", r.chain_nodes},
                                      {"errors", r.chain_rule_errors},
                                      {"orders", optional_orders(r.chain_rule_errors)}}},
                      {"commutator", r.commutator ? json(*r.commutator) : json(nullptr)}});
  }
  return {{"charts", charts}};
}

void write_failure(const RunConfig& c, ErrorKind kind, const std::string& message, const json& detail) {
  const json marker = {{"experiment", c.experiment},
                       {"kind", std::string(to_string(kind))},
                       {"message", message},
                       {"detail", detail}};
  try {
    write_json(c.out_dir / kFailureMarker, marker);
  } catch (const Error& e) {
    std::cerr << "nsp-stab: cannot write failure marker: " << e.what() << "\n";
  }
}

}  // namespace

int execute(const RunConfig& c) {
  if (!known_experiment(c.experiment)) {
    std::cerr << "nsp-stab: unknown experiment '" << c.experiment << "'\n";
    return kExitConfigFailure;
  }
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) {
    std::cerr << "nsp-stab: cannot create " << c.out_dir << ": " << ec.message() << "\n";
    return kExitRunFailure;
  }
  fs::remove(c.out_dir / kFailureMarker, ec);

  try {
    json summary;
    if (c.experiment == "steady")
      summary = run_steady(c);
    else if (c.experiment == "evolve")
      summary = run_evolve(c, false);
    else if (c.experiment == "decay")
      summary = run_evolve(c, true);
    else if (c.experiment == "verify-elliptic")
      summary = run_verify(c);
    else
      summary = run_geometry(c);
    summary["experiment"] = c.experiment;
    summary["config"] = echo(c);
    write_json(c.out_dir / "summary.json", summary);
    return kExitOk;
  } catch (const RunFailure& f) {
    std::cerr << "nsp-stab: " << f.message << "\n";
    write_failure(c, f.kind, f.message, f.detail);
    return kExitRunFailure;
  } catch (const Error& e) {
    std::cerr << "nsp-stab: " << e.what() << "\n";
    if (e.kind() == ErrorKind::ConfigError) return kExitConfigFailure;
    write_failure(c, e.kind(), e.what(), json::object());
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "nsp-stab: " << e.what() << "\n";
    write_failure(c, ErrorKind::IoError, e.what(), json::object());
    return kExitRunFailure;
  }
}

}  // namespace nsp::cli
