#include "nsp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nsp/elliptic.hpp"
#include "nsp/error.hpp"
#include "nsp/ops.hpp"

namespace nsp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_resolution(const Grid& grid, int m) {
  const int need = 4 * m;
  const int axes = grid.radial() ? 1 : 3;
  for (int a = 0; a < axes; ++a)
    if (static_cast<int>(grid.dims[a]) < need)
      throw Error(ErrorKind::ResolutionTooLow, "order-" + std::to_string(m) + " norm needs " +
                                                   std::to_string(need) + " nodes per axis");
}

double vnorm(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

}  // namespace

double sobolev_norm_sq(const Grid& grid, const ScalarField& f, int m) {
  if (m < 0 || m > 3) throw Error(ErrorKind::PreconditionViolated, "scalar norms are of order 0..3");
  check_resolution(grid, m);
  const auto d = ops::derivative_sq(grid, f, m);
  double s = 0.0;
  for (const auto& dl : d) s += integrate(grid, dl);
  return s;
}

double sobolev_norm_sq(const Grid& grid, const VectorField& u, int m) {
  if (m < 0 || m > 4) throw Error(ErrorKind::PreconditionViolated, "vector norms are of order 0..4");
  check_resolution(grid, m);
  const auto d = ops::derivative_sq(grid, u, m);
  double s = 0.0;
  for (const auto& dl : d) s += integrate(grid, dl);
  return s;
}

double sobolev_norm(const Grid& grid, const ScalarField& f, int m) {
  return std::sqrt(sobolev_norm_sq(grid, f, m));
}

double sobolev_norm(const Grid& grid, const VectorField& u, int m) {
  return std::sqrt(sobolev_norm_sq(grid, u, m));
}

EnergyReport energy_functionals(const Grid& grid, const PerturbationState& s) {
  check_resolution(grid, 4);
  EnergyReport r;
  r.t = s.t;
  auto& t = r.terms;
  t["q3"] = sobolev_norm_sq(grid, s.q, 3);
  t["u3"] = sobolev_norm_sq(grid, s.u, 3);
  t["u4"] = sobolev_norm_sq(grid, s.u, 4);
  t["grad_phi3"] = sobolev_norm_sq(grid, ops::gradient(grid, s.phi), 3);
  t["q_t2"] = sobolev_norm_sq(grid, s.q_t, 2);
  t["u_t1"] = sobolev_norm_sq(grid, s.u_t, 1);
  t["u_t2"] = sobolev_norm_sq(grid, s.u_t, 2);
  r.E = t["q3"] + t["u3"] + t["grad_phi3"] + t["q_t2"] + t["u_t1"];
  r.D = t["q3"] + t["grad_phi3"] + t["u4"] + t["q_t2"] + t["u_t2"];
  return r;
}

double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

CutoffSystem::CutoffSystem(const Grid& grid, double support_depth, double core_fraction)
    : grid_(&grid) {
  if (!(core_fraction > 0.0 && core_fraction < 1.0))
    throw Error(ErrorKind::PreconditionViolated, "core fraction must lie in (0, 1)");
  charts_ = boundary_charts(grid.spec);
  double min_depth = 1e300;
  for (const auto& c : charts_) {
    maps_.push_back(coordinate_map(c, default_collar_depth(grid.spec, c)));
    min_depth = std::min(min_depth, maps_.back().depth);
  }
  support_ = support_depth > 0.0 ? support_depth : min_depth;
  core_ = core_fraction * support_;

  const std::size_t n = grid.size();
  chi0_nodes_.assign(n, 0.0);
  chi_nodes_.assign(charts_.size(), ScalarField(n, 0.0));
  if (grid.radial()) {
    // Sphere averages of the angular weights; radial parts factor out.
    std::vector<double> avg(charts_.size(), 0.0);
    const int nt = 240, np = 480;
    double wsum = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double th = kPi * (i + 0.5) / nt;
      for (int j = 0; j < np; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / np;
        const Vec3 x{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        const double w = std::sin(th);
        wsum += w;
        for (std::size_t l = 0; l < charts_.size(); ++l) avg[l] += w * angular_sq(l, x);
      }
    }
    for (double& a : avg) a /= wsum;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 x{grid.radius(i), 0.0, 0.0};
      const double S = normaliser(x);
      chi0_nodes_[i] = chi0_sq(x);
      for (std::size_t l = 0; l < charts_.size(); ++l) {
        const double p = boundary_profile(l, x);
        chi_nodes_[l][i] = p * p * avg[l] / S;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      chi0_nodes_[i] = chi0_sq(grid.coords[i]);
      for (std::size_t l = 0; l < charts_.size(); ++l) chi_nodes_[l][i] = chi_sq(l, grid.coords[i]);
    }
  }
  floor_ = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    double s = chi0_nodes_[i];
    for (const auto& c : chi_nodes_) s += c[i];
    floor_ = std::min(floor_, s);
  }
}

double CutoffSystem::distance(std::size_t l, const Vec3& x) const {
  const auto& c = charts_[l];
  if (c.shape() == BoundaryChart::Shape::Sphere) {
    const double r = vnorm(x);
    return c.orientation() > 0.0 ? c.radius() - r : r - c.radius();
  }
  const int a = c.polar_axis();
  return c.high_side() ? grid_->spec.lengths[a] - x[a] : x[a];
}

double CutoffSystem::boundary_profile(std::size_t l, const Vec3& x) const {
  return 1.0 - smoothstep5((distance(l, x) - core_) / (support_ - core_));
}

double CutoffSystem::angular_sq(std::size_t l, const Vec3& x) const {
  const auto& c = charts_[l];
  if (c.shape() == BoundaryChart::Shape::Plane) return 1.0;
  auto weight = [&](const BoundaryChart& ch) {
    const double th = ch.polar_angle(x);
    const double from_pole = std::min(th, kPi - th);
    return smoothstep5((from_pole - BoundaryChart::kBandLow) /
                       (BoundaryChart::kCoreLow - BoundaryChart::kBandLow));
  };
  const double a = weight(c);
  const double b = weight(charts_[l ^ 1]);
  return a * a / (a * a + b * b);
}

double CutoffSystem::normaliser(const Vec3& x) const {
  // Distinct boundary pieces: each sphere carries two charts (l, l ^ 1).
  const bool spheres = grid_->radial();
  double raw = 1.0;
  double sum = 0.0;
  for (std::size_t l = 0; l < charts_.size(); ++l) {
    const double p = boundary_profile(l, x);
    if (!spheres || l % 2 == 0) raw *= 1.0 - p;
    sum += p * p * angular_sq(l, x);
  }
  return raw * raw + sum;
}

double CutoffSystem::chi0_sq(const Vec3& x) const {
  const bool spheres = grid_->radial();
  double raw = 1.0;
  for (std::size_t l = 0; l < charts_.size(); ++l)
    if (!spheres || l % 2 == 0) raw *= 1.0 - boundary_profile(l, x);
  return raw * raw / normaliser(x);
}

double CutoffSystem::chi_sq(std::size_t l, const Vec3& x) const {
  const double p = boundary_profile(l, x);
  return p * p * angular_sq(l, x) / normaliser(x);
}

ScalarField interpolate(const Grid& grid, const ScalarField& f, const std::vector<Vec3>& points) {
  ScalarField out(points.size(), 0.0);
  // Four-point Lagrange weights for offset s in [0, 3] relative to the stencil start.
  auto weights = [](double s) {
    std::array<double, 4> w{};
    for (int j = 0; j < 4; ++j) {
      double v = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != j) v *= (s - m) / (j - m);
      w[j] = v;
    }
    return w;
  };
  auto stencil = [](double s, std::size_t n, bool periodic, std::array<std::size_t, 4>& idx) {
    long base = static_cast<long>(std::floor(s)) - 1;
    if (!periodic) base = std::clamp(base, 0L, static_cast<long>(n) - 4);
    for (int j = 0; j < 4; ++j) {
      long k = base + j;
      if (periodic) k = ((k % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
      idx[j] = static_cast<std::size_t>(k);
    }
    return s - static_cast<double>(base);
  };
  if (grid.radial()) {
    const double r0 = grid.spec.r_inner, h = grid.spacing[0];
    for (std::size_t p = 0; p < points.size(); ++p) {
      std::array<std::size_t, 4> idx{};
      const double s = stencil((vnorm(points[p]) - r0) / h, grid.size(), false, idx);
      const auto w = weights(s);
      for (int j = 0; j < 4; ++j) out[p] += w[j] * f[idx[j]];
    }
    return out;
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::array<std::array<std::size_t, 4>, 3> idx{};
    std::array<std::array<double, 4>, 3> w{};
    for (int a = 0; a < 3; ++a) {
      const double s =
          stencil(points[p][a] / grid.spacing[a], grid.dims[a], grid.periodic(a), idx[a]);
      w[a] = weights(s);
    }
    double v = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
          v += w[0][i] * w[1][j] * w[2][k] * f[grid.index(idx[0][i], idx[1][j], idx[2][k])];
    out[p] = v;
  }
  return out;
}

namespace {

// Chart derivative d_xi^a d_zeta^b d_r^c of a field on the map nodes, memoised.
class ChartDerivatives {
public:
  ChartDerivatives(const ScalarField& f, const CoordinateMap& map) : map_(map) {
    memo_[{0, 0, 0}] = f;
  }

  const ScalarField& get(int a, int b, int c) {
    const std::array<int, 3> key{a, b, c};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::array<int, 3> parent = key;
    int axis = 2;
    if (c > 0) {
      --parent[2];
    } else if (b > 0) {
      --parent[1];
      axis = 1;
    } else {
      --parent[0];
      axis = 0;
    }
    const ScalarField base = get(parent[0], parent[1], parent[2]);
    const FrameDerivatives d = frame_derivatives(base, map_);
    memo_[{parent[0] + 1, parent[1], parent[2]}] = d.d_xi;
    memo_[{parent[0], parent[1] + 1, parent[2]}] = d.d_zeta;
    memo_[{parent[0], parent[1], parent[2] + 1}] = d.d_r;
    (void)axis;
    return memo_.at(key);
  }

private:
  const CoordinateMap& map_;
  std::map<std::array<int, 3>, ScalarField> memo_;
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

LocalizedReport localized_norms(const Grid& grid, const ScalarField& q, const SteadyState& ss,
                                const CutoffSystem& cutoffs) {
  for (std::size_t l = 0; l < cutoffs.chart_count(); ++l)
    if (cutoffs.support_depth() > cutoffs.map(l).depth * (1.0 + 1e-12))
      throw Error(ErrorKind::ChartCoverage, "boundary cutoff " + std::to_string(l) +
                                                " reaches beyond its chart collar");

  const double g = ss.gamma;
  const std::size_t n = grid.size();
  LocalizedReport rep;
  const auto ds = ops::derivative_sq(grid, q, 3);
  ScalarField w_t(n), w_n(n);
  double wmin = 1e300, wmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w_t[i] = std::pow(ss.rho[i], g - 2.0);
    w_n[i] = std::pow(ss.rho[i], g - 4.0);
    wmin = std::min({wmin, w_t[i], w_n[i]});
    wmax = std::max({wmax, w_t[i], w_n[i]});
  }
  const ScalarField& c0 = cutoffs.chi0_sq_nodes();
  for (int k = 1; k <= 3; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += grid.weight[i] * c0[i] * w_n[i] * ds[k][i];
    rep.interior[k - 1] = s;
  }
  rep.global_first_order = integrate(grid, ds[1]);

  const VectorField grad = ops::gradient(grid, q);
  rep.first_order_sum = rep.interior[0];
  double ceiling = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = c0[i];
    for (std::size_t l = 0; l < cutoffs.chart_count(); ++l) s += cutoffs.chi_sq_nodes(l)[i];
    ceiling = std::max(ceiling, s);
  }

  for (std::size_t l = 0; l < cutoffs.chart_count(); ++l) {
    ChartNorms cn;
    const ScalarField& cl = cutoffs.chi_sq_nodes(l);
    const auto& chart = cutoffs.chart(l);
    for (std::size_t i = 0; i < n; ++i) {
      double tan2 = 0.0, nor2 = 0.0;
      if (grid.radial()) {
        nor2 = ds[1][i];
      } else {
        const int a = chart.polar_axis();
        for (int b = 0; b < 3; ++b) (b == a ? nor2 : tan2) += grad[b][i] * grad[b][i];
      }
      cn.frame_tangential += grid.weight[i] * cl[i] * w_t[i] * tan2;
      cn.frame_normal += grid.weight[i] * cl[i] * w_n[i] * nor2;
    }
    rep.first_order_sum += cn.frame_tangential + cn.frame_normal;

    // Chart-coordinate norms on the collar map.
    const CoordinateMap& map = cutoffs.map(l);
    const ScalarField qm = interpolate(grid, q, map.x);
    const ScalarField rm = interpolate(grid, ss.rho, map.x);
    const ScalarField vw = map.volume_weights();
    ScalarField wt(map.size()), wn(map.size());
    for (std::size_t p = 0; p < map.size(); ++p) {
      const double chi = cutoffs.chi_sq(l, map.x[p]);
      wt[p] = vw[p] * chi * std::pow(rm[p], g - 2.0);
      wn[p] = vw[p] * chi * std::pow(rm[p], g - 4.0);
    }
    ChartDerivatives cd(qm, map);
    for (int k = 1; k <= 3; ++k) {
      double s = 0.0;
      for (int a = 0; a <= k; ++a) {
        const ScalarField& d = cd.get(a, k - a, 0);
        const double mult = binomial(k, a);
        for (std::size_t p = 0; p < map.size(); ++p) s += mult * wt[p] * d[p] * d[p];
      }
      cn.tangential[k - 1] = s;
    }
    for (int k = 0; k <= 2; ++k)
      for (int m = 0; k + m <= 2; ++m) {
        double s = 0.0;
        for (int a = 0; a <= k; ++a) {
          const ScalarField& d = cd.get(a, k - a, m + 1);
          const double mult = binomial(k, a);
          for (std::size_t p = 0; p < map.size(); ++p) s += mult * wn[p] * d[p] * d[p];
        }
        cn.normal[{k, m}] = s;
      }
    rep.charts.push_back(std::move(cn));
  }
  rep.lower_bound = cutoffs.floor() * wmin * rep.global_first_order;
  rep.upper_bound = ceiling * wmax * rep.global_first_order;
  return rep;
}

double basic_energy(const Grid& grid, const PerturbationState& s, const SteadyState& ss) {
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double u2 = 0.0;
    for (const auto& c : s.u.comp) u2 += c[i] * c[i];
    const double rho = ss.rho[i] + s.q[i];
    e += grid.weight[i] *
         (rho * u2 + ss.gamma * std::pow(ss.rho[i], ss.gamma - 2.0) * s.q[i] * s.q[i]);
  }
  return 0.5 * e + 0.5 * ops::dirichlet_energy(grid, s.phi);
}

namespace {

double source_integral(const Grid& grid, const PerturbationState& s, const SteadyState& ss,
                       const SchemeParams& params) {
  const NonlinearTerms nl = nonlinear_terms(grid, s, ss, params);
  const VectorField gphi = ops::gradient(grid, s.phi);
  const VectorField gh = ops::gradient(grid, nl.h);
  double a = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double flow = 0.0;
    for (std::size_t c = 0; c < s.u.ncomp(); ++c)
      flow += (s.q[i] * gphi[c][i] - gh[c][i]) * s.u[c][i];
    const double pot = ss.gamma * std::pow(ss.rho[i], ss.gamma - 2.0) * s.q[i] - s.phi[i];
    a += grid.weight[i] * (flow + pot * nl.f0[i]);
  }
  return a;
}

}  // namespace

double energy_identity_residual(const Grid& grid, const PerturbationState& s,
                                const PerturbationState& next, double dt, const SteadyState& ss,
                                const SchemeParams& params) {
  const double dq = (basic_energy(grid, next, ss) - basic_energy(grid, s, ss)) / dt;
  VectorField um(s.u.ncomp(), grid.size());
  for (std::size_t c = 0; c < um.ncomp(); ++c)
    for (std::size_t i = 0; i < grid.size(); ++i) um[c][i] = 0.5 * (s.u[c][i] + next.u[c][i]);
  const double diss = ops::viscous_dissipation(grid, um, params.mu, params.lambda);
  const double a0 =
      0.5 * (source_integral(grid, s, ss, params) + source_integral(grid, next, ss, params));
  return std::abs(dq + diss - a0);
}

double imp1_ratio(const Grid& grid, const PerturbationState& s) {
  const double gu = std::sqrt(integrate(grid, ops::derivative_sq(grid, s.u, 1)[1]));
  if (gu < 1e-14) throw Error(ErrorKind::ZeroDenominator, "||grad u|| vanishes");
  ScalarField q_t = s.q_t;
  remove_mean(grid, q_t);  // zero in the continuum; O(h^2) for pointwise stencils
  const ScalarField phi_t = solve_neumann_poisson(grid, {q_t, {}});
  return l2_norm(grid, ops::gradient(grid, phi_t)) / gu;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& E, double t_min,
                   double t_max) {
  if (t.size() != E.size()) throw Error(ErrorKind::PreconditionViolated, "series length mismatch");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(E[i] > 0.0))
      throw Error(ErrorKind::NonpositiveEnergy, "nonpositive energy at t = " + std::to_string(t[i]));
    ts.push_back(t[i]);
    ys.push_back(std::log(E[i]));
  }
  if (ts.size() < 10)
    throw Error(ErrorKind::InsufficientData, "decay fit needs at least 10 samples in the window");
  const double n = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (!(stt > 0.0)) throw Error(ErrorKind::InsufficientData, "all samples share one time");
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double sse = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    sse += r * r;
  }
  DecayFit fit;
  fit.C = std::exp(intercept);
  fit.sigma = -slope;
  fit.goodness = syy > 0.0 ? 1.0 - sse / syy : (sse == 0.0 ? 1.0 : 0.0);
  fit.samples = ts.size();
  fit.decaying = fit.sigma > 0.0;
  return fit;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& E) {
  if (t.empty()) throw Error(ErrorKind::InsufficientData, "empty series");
  const double T = t.back();
  return decay_fit(t, E, 0.2 * T, T);
}

}  // namespace nsp
