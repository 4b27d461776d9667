#include "mabuchi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mabuchi/report.hpp"

namespace mabuchi {

double Check::margin() const {
  if (margins.empty()) return 0.0;
  return *std::min_element(margins.begin(), margins.end());
}

bool ExperimentReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

const Check* ExperimentReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double ExperimentReport::worst_slack() const {
  double w = INFINITY;
  for (const auto& c : checks) w = std::min(w, c.margin() + c.tolerance);
  return w;
}

MomentPolytope ExperimentConfig::resolve_polytope() const {
  return facets.empty() ? make_polytope(polytope) : make_polytope(polytope, facets);
}

DiscretizationPtr ExperimentConfig::discretization() const {
  GridOptions g;
  g.h = h;
  g.order = order;
  return make_discretization(resolve_polytope(), g);
}

ExperimentConfig ExperimentConfig::refined() const {
  ExperimentConfig c = *this;
  c.h = 0.5 * (h > 0 ? h : default_spacing(resolve_polytope().dimension()));
  const int dim = resolve_polytope().dimension();
  c.strip.cells_t = 2 * strip.cells_t;
  c.strip.cells_s = 2 * (strip.cells_s > 0 ? strip.cells_s : (dim == 1 ? 64 : 16));
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kMaxChecks = 32;

int workers_of(const ExperimentConfig& c) { return c.workers > 0 ? c.workers : default_workers(); }

std::string describe(const std::string& label, const std::vector<double>& c) {
  std::string s = label + "=[";
  for (std::size_t k = 0; k < c.size(); ++k) s += (k ? " " : "") + format_number(c[k]);
  return s + "]";
}

ExperimentReport start(const std::string& id, const ExperimentConfig& config, const Discretization& d) {
  ExperimentReport r;
  r.id = id;
  r.polytope = d.polytope().name();
  r.seed = config.seed;
  r.h = d.grid().h;
  r.order = d.grid().order;
  r.checks.reserve(kMaxChecks);  // add_check hands out references
  return r;
}

// Bin centers and counts of the per-sample margins.
std::vector<std::pair<double, double>> histogram(const std::vector<std::pair<double, double>>& series, int bins = 20) {
  if (series.empty()) return {};
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : series) {
    lo = std::min(lo, p.second);
    hi = std::max(hi, p.second);
  }
  const double w = hi > lo ? (hi - lo) / bins : 1.0;
  std::vector<std::pair<double, double>> out;
  for (int b = 0; b < bins; ++b) out.emplace_back(lo + (b + 0.5) * w, 0.0);
  for (const auto& p : series) out[std::min(bins - 1, static_cast<int>((p.second - lo) / w))].second += 1.0;
  return out;
}

void finish(ExperimentReport& r, Clock::time_point t0) {
  if (auto it = r.plots.find("margins"); it != r.plots.end()) r.plots["margin_histogram"] = histogram(it->second);
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

Check& add_check(ExperimentReport& r, const std::string& name, double tolerance) {
  if (r.checks.size() == kMaxChecks) throw Error(ErrorKind::InvalidArgument, "too many checks in one report");
  r.checks.push_back(Check{name, tolerance, {}});
  return r.checks.back();
}

struct Draw {
  Poly v;
  std::vector<double> coefficients;
};

std::vector<Draw> draw_many(RandomPotentialSampler& sampler, Rng& rng, int count) {
  std::vector<Draw> out;
  for (int i = 0; i < count; ++i) {
    Poly v = sampler.draw(rng);
    out.push_back({std::move(v), sampler.last_coefficients()});
  }
  return out;
}

}  // namespace

ExperimentReport run_thm12(const ExperimentConfig& config) {
  const auto t0 = Clock::now();
  const auto d = config.discretization();
  auto r = start("thm12", config, *d);
  const int n = config.n > 0 ? config.n : (d->dimension() == 1 ? 50 : 25);
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "thm12 needs at least one pair");
  const auto base = guillemin_potential(d);
  r.s_max = default_s_max(base);

  RandomPotentialSampler sampler(d->polytope(), config.box);
  Rng rng(config.seed);
  std::vector<std::pair<Draw, Draw>> pairs;
  for (int i = 0; i < n; ++i) {
    auto a = draw_many(sampler, rng, 1).front();
    auto b = draw_many(sampler, rng, 1).front();
    pairs.emplace_back(std::move(a), std::move(b));
  }
  r.acceptance_rate = sampler.acceptance_rate();

  r.columns = {"delta_E", "distance", "calabi_0", "calabi_1", "margin_forward", "margin_reverse"};
  r.rows.assign(n, {});
  parallel_for(n, workers_of(config), [&](std::size_t i) {
    const auto u0 = make_potential(base, pairs[i].first.v);
    const auto u1 = make_potential(base, pairs[i].second.v);
    const double dE = k_energy_delta(PotentialPath::linear(u0, u1, 2), config.time_nodes);
    const double dist = geodesic_distance(u0, u1);
    const double ca0 = calabi_energy(u0), ca1 = calabi_energy(u1);
    r.rows[i] = {dE, dist, ca0, ca1, dist * std::sqrt(ca1) - dE, dist * std::sqrt(ca0) + dE};
  });

  auto& fwd = add_check(r, "thm12_forward", 1e-4);
  auto& rev = add_check(r, "thm12_reverse", 1e-4);
  for (int i = 0; i < n; ++i) {
    r.descriptors.push_back(describe("v0", pairs[i].first.coefficients) + ";" +
                            describe("v1", pairs[i].second.coefficients));
    fwd.margins.push_back(r.rows[i][4]);
    rev.margins.push_back(r.rows[i][5]);
    r.plots["margins"].emplace_back(i, r.rows[i][4]);
    r.plots["margins"].emplace_back(i, r.rows[i][5]);
  }
  r.samples = n;
  r.summary["min_margin"] = std::min(fwd.margin(), rev.margin());
  finish(r, t0);
  return r;
}

ExperimentReport run_lemma43(const ExperimentConfig& config) {
  const auto t0 = Clock::now();
  const auto d = config.discretization();
  auto r = start("lemma43", config, *d);
  const int n = config.n > 0 ? config.n : 50;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "lemma43 needs at least one pair");
  const auto base = guillemin_potential(d);
  r.s_max = default_s_max(base);

  RandomPotentialSampler sampler(d->polytope(), config.box);
  Rng rng(config.seed);
  const auto draws = draw_many(sampler, rng, 2 * n);
  r.acceptance_rate = sampler.acceptance_rate();

  const int m = std::max(3, config.time_nodes);
  r.columns = {"rate_0", "rate_1", "endpoint_margin", "min_increment", "reverse_mismatch"};
  r.rows.assign(n, {});
  std::vector<std::vector<double>> traces(n);
  parallel_for(n, workers_of(config), [&](std::size_t i) {
    const auto u0 = make_potential(base, draws[2 * i].v);
    const auto u1 = make_potential(base, draws[2 * i + 1].v);
    const auto fwd = PotentialPath::linear(u0, u1, 2);
    const auto bwd = PotentialPath::linear(u1, u0, 2);
    std::vector<double> trace(m);
    double min_inc = INFINITY, mismatch = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t = static_cast<double>(k) / (m - 1);
      trace[k] = k_energy_rate(fwd, t);
      if (k > 0) min_inc = std::min(min_inc, trace[k] - trace[k - 1]);
    }
    // Reversing the geodesic negates the velocity: rate_bwd(s) = -rate_fwd(1 - s).
    for (int k : {0, m / 2, m - 1}) {
      const double s = static_cast<double>(k) / (m - 1);
      mismatch = std::max(mismatch, std::abs(k_energy_rate(bwd, s) + trace[m - 1 - k]));
    }
    r.rows[i] = {trace.front(), trace.back(), trace.back() - trace.front(), min_inc, mismatch};
    traces[i] = std::move(trace);
  });

  auto& endpoint = add_check(r, "lemma43_endpoint", 1e-5);
  auto& monotone = add_check(r, "lemma43_monotone", 1e-6);
  auto& reverse = add_check(r, "lemma43_reverse", 1e-9);
  for (int i = 0; i < n; ++i) {
    r.descriptors.push_back(describe("v0", draws[2 * i].coefficients) + ";" +
                            describe("v1", draws[2 * i + 1].coefficients));
    endpoint.margins.push_back(r.rows[i][2]);
    monotone.margins.push_back(r.rows[i][3]);
    reverse.margins.push_back(-r.rows[i][4]);
    r.plots["margins"].emplace_back(i, r.rows[i][2]);
  }
  for (int k = 0; k < m; ++k) r.plots["trace_0"].emplace_back(static_cast<double>(k) / (m - 1), traces[0][k]);
  r.samples = n;
  r.summary["min_increment"] = monotone.margin();
  finish(r, t0);
  return r;
}

NearExtremal near_extremal_search(const SymplecticPotential& base, int iterations) {
  const Discretization& d = base.disc();
  constexpr int kParams = 6;
  const int n = d.dimension();
  std::vector<Poly> family;
  for (int k = 0; k < kParams; ++k) family.push_back(Poly::monomial(n, k + 2, 0));
  const auto& w = d.grid().weights;

  auto smooth_of = [&](const Eigen::VectorXd& c) {
    Poly v = base.smooth();
    for (int k = 0; k < kParams; ++k) v += family[k] * c(k);
    return v;
  };
  // Weighted residual sqrt(w) (S - S_bar); empty when c leaves the admissible cone.
  auto residual = [&](const Eigen::VectorXd& c, Eigen::VectorXd& out) {
    try {
      const SymplecticPotential u(base.discretization(), smooth_of(c), base.has_reference());
      const auto curv = scalar_curvature(u);
      out.resize(static_cast<Eigen::Index>(w.size()));
      for (std::size_t k = 0; k < w.size(); ++k) out(k) = std::sqrt(w[k]) * curv.residual[k];
      return true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotAdmissible) throw;
      return false;
    }
  };

  NearExtremal out;
  out.futaki_extremal = extremal_field(d).futaki_value;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(kParams), r;
  if (!residual(c, r)) throw Error(ErrorKind::NotAdmissible, "near-extremal search needs an admissible start");
  double ca = r.squaredNorm(), mu = 1e-3;
  out.history.push_back(ca);
  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXd J(r.size(), kParams);
    const double step = 1e-6;
    for (int k = 0; k < kParams; ++k) {
      Eigen::VectorXd ck = c, rk;
      ck(k) += step;
      if (!residual(ck, rk)) {
        ck(k) = c(k) - step;
        if (!residual(ck, rk)) throw Error(ErrorKind::NotAdmissible, "near-extremal iterate on the cone boundary");
        J.col(k) = (r - rk) / step;
      } else {
        J.col(k) = (rk - r) / step;
      }
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += mu * JtJ.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      Eigen::VectorXd trial = c + delta, rt;
      if (residual(trial, rt) && rt.squaredNorm() < ca) {
        c = trial;
        r = rt;
        const double previous = ca;
        ca = rt.squaredNorm();
        mu = std::max(mu / 3, 1e-9);
        improved = true;
        out.history.push_back(ca);
        if (previous - ca <= 1e-10 * previous) it = iterations;
      } else {
        mu *= 10;
      }
    }
    ++out.iterations;
    if (!improved) break;
  }
  out.coefficients.assign(c.data(), c.data() + c.size());
  out.calabi = ca;
  out.relative_gap = out.futaki_extremal > 0 ? (ca - out.futaki_extremal) / out.futaki_extremal : ca;
  return out;
}

ExperimentReport run_calabi_bound(const ExperimentConfig& config) {
  const auto t0 = Clock::now();
  const auto d = config.discretization();
  auto r = start("calabi_bound", config, *d);
  const int n = config.n > 0 ? config.n : 100;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "calabi_bound needs at least one metric");
  const auto base = guillemin_potential(d);
  r.s_max = default_s_max(base);
  const auto xc = extremal_field(*d);
  const bool chain = xc.futaki_value > 1e-8;
  const auto base_curv = scalar_curvature(base);

  RandomPotentialSampler sampler(d->polytope(), config.box);
  Rng rng(config.seed);
  const auto draws = draw_many(sampler, rng, n);
  r.acceptance_rate = sampler.acceptance_rate();

  r.columns = {"calabi", "rho_sq", "rho_perp_sq", "cauchy_schwarz", "futaki_extremal", "decomposition_error",
               "hwang_margin"};
  const std::size_t nl = config.ray_lengths.size();
  if (chain)
    for (double l : config.ray_lengths) {
      const std::string tag = "_l" + format_number(l);
      for (const char* c : {"rate_start", "rate_end", "distance", "chain_bound"}) r.columns.push_back(c + tag);
    }
  r.rows.assign(n, {});
  parallel_for(n, workers_of(config), [&](std::size_t i) {
    const auto u = make_potential(base, draws[i].v);
    const auto curv = scalar_curvature(u);
    const auto hw = hwang_bound(u, curv, xc);
    auto& row = r.rows[i];
    row = {hw.calabi, hw.rho_sq, hw.rho_perp_sq, hw.cauchy_schwarz, hw.futaki_extremal, hw.decomposition_error,
           hw.margin()};
    if (!chain) return;
    // Geodesic from u to ray(l) = base + l theta_c; the ray's curvature is the base's.
    for (double l : config.ray_lengths) {
      const Poly vel = base.smooth() + xc.theta.as_polynomial() * l - u.smooth();
      const double rate0 = k_energy_rate(*d, curv, vel);
      const double rate1 = k_energy_rate(*d, base_curv, vel);
      const double dist = std::sqrt(integrate_interior(*d, [&](const Vec& x) {
        const double v = vel(x);
        return v * v;
      }));
      const double bound = std::pow(std::max(0.0, -rate1) / dist, 2);
      row.insert(row.end(), {rate0, rate1, dist, bound});
    }
  });

  auto& hwang = add_check(r, "calabi_bound", 1e-5);
  auto& decomposition = add_check(r, "hwang_decomposition", 1e-8);
  auto& projection = add_check(r, "hwang_cauchy_schwarz", 1e-8);
  auto& futaki_link = add_check(r, "hwang_rho_equals_futaki", 1e-5);
  Check* lemma = chain ? &add_check(r, "chain_endpoint", 1e-5) : nullptr;
  Check* cs = chain ? &add_check(r, "chain_cauchy_schwarz", 1e-5) : nullptr;
  Check* bound = chain ? &add_check(r, "chain_bound", 1e-5) : nullptr;
  for (int i = 0; i < n; ++i) {
    const auto& row = r.rows[i];
    r.descriptors.push_back(describe("v", draws[i].coefficients));
    hwang.margins.push_back(row[6]);
    decomposition.margins.push_back(-row[5]);
    projection.margins.push_back(row[1] - row[3]);
    futaki_link.margins.push_back(-std::abs(row[1] - row[4]));
    r.plots["margins"].emplace_back(i, row[6]);
    if (!chain) continue;
    for (std::size_t k = 0; k < nl; ++k) {
      const double rate0 = row[7 + 4 * k], rate1 = row[8 + 4 * k], dist = row[9 + 4 * k], b = row[10 + 4 * k];
      lemma->margins.push_back(rate1 - rate0);
      cs->margins.push_back(std::sqrt(row[0]) * dist + rate0);
      bound->margins.push_back(row[0] - b);
      if (i == 0) r.plots["chain_bound_vs_l"].emplace_back(config.ray_lengths[k], b);
    }
  }
  r.samples = n;
  r.summary["futaki_extremal"] = xc.futaki_value;
  r.summary["min_margin"] = hwang.margin();

  if (chain && config.near_extremal) {
    const auto ne = near_extremal_search(base);
    auto& near = add_check(r, "near_extremal_gap", 0.0);
    near.margins.push_back(0.05 - ne.relative_gap);
    r.summary["near_extremal_calabi"] = ne.calabi;
    r.summary["near_extremal_relative_gap"] = ne.relative_gap;
    r.summary["near_extremal_iterations"] = ne.iterations;
    for (std::size_t k = 0; k < ne.history.size(); ++k) r.plots["near_extremal_descent"].emplace_back(k, ne.history[k]);
  }
  finish(r, t0);
  return r;
}

ExperimentReport run_estimate_monitors(const ExperimentConfig& config) {
  const auto t0 = Clock::now();
  const auto d = config.discretization();
  auto r = start("monitors", config, *d);
  const int n = config.n > 0 ? config.n : 50;
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "monitors needs at least one sample");
  if (config.T_list.size() < 2) throw Error(ErrorKind::InvalidArgument, "T_list needs at least two entries");
  const auto& P = d->polytope();
  const int dim = P.dimension();
  const auto base = guillemin_potential(d);
  r.s_max = default_s_max(base);
  r.eps_schedule = config.eps;

  // Exhaustion along the affine ray of the first coordinate.
  Vec a = Vec::Zero(dim);
  a(0) = 1.0;
  const AffineField f = AffineField(a, 0.0).normalized(P);
  const double T_max = *std::max_element(config.T_list.begin(), config.T_list.end());
  const auto ray = ray_from_affine(base, f, T_max, 9);
  const Poly bump = bubble(P) * 0.2;
  const auto u0 = make_potential(base, bump);
  const auto self = ray_by_exhaustion(base, ray, config.T_list);
  const auto ex = ray_by_exhaustion(u0, ray, config.T_list);
  add_check(r, "exhaustion_self", 1e-12).margins.push_back(-*std::max_element(self.monitor.begin(), self.monitor.end()));
  add_check(r, "exhaustion_uniformity", 0.0).margins.push_back(1e-5 - ex.uniformity);
  auto& cauchy = add_check(r, "exhaustion_cauchy", 1e-12);
  for (std::size_t k = 0; k + 1 < ex.gaps.size(); ++k) cauchy.margins.push_back(ex.gaps[k] - ex.gaps[k + 1]);
  if (dim == 1 && P.name() == "P1")  // sup of 0.2 x (1 - x)
    add_check(r, "exhaustion_parallel_oracle", 1e-12).margins.push_back(-std::abs(ex.parallel_constant - 0.05));
  for (std::size_t k = 0; k < ex.T_list.size(); ++k) {
    r.plots["exhaustion_monitor"].emplace_back(ex.T_list[k], ex.monitor[k]);
    if (k < ex.gaps.size()) r.plots["exhaustion_gaps"].emplace_back(ex.T_list[k], ex.gaps[k]);
  }
  r.summary["parallel_constant"] = ex.parallel_constant;
  r.summary["exhaustion_uniformity"] = ex.uniformity;

  // Yen integrand of the affine ray against the class Futaki value.
  const double futaki = futaki_boundary_value(-f, *d);
  auto& yen = add_check(r, "yen_identity", 1e-5);
  double lo = INFINITY, hi = -INFINITY;
  for (double y : ray.yen_integrand) {
    yen.margins.push_back(-std::abs(y - futaki));
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  add_check(r, "yen_constant", 1e-5).margins.push_back(-(hi - lo));

  const auto tamed = tamed_diagnostics(ray, ambient_of(ray, true));
  r.summary["tamed_self_trace_max"] = tamed.trace_max;
  r.summary["tamed_self_time_max"] = tamed.time_max;

  // Distance lower bound on random potentials.
  RandomPotentialSampler sampler(P, config.box);
  Rng rng(config.seed);
  const auto draws = draw_many(sampler, rng, n);
  const int pairs = std::max(0, config.strip_pairs);
  const auto strip_draws = draw_many(sampler, rng, 2 * pairs);
  r.acceptance_rate = sampler.acceptance_rate();
  r.columns = {"negative_part", "positive_part", "distance", "distance_margin"};
  r.rows.assign(n, {});
  parallel_for(n, workers_of(config), [&](std::size_t i) {
    const auto b = distance_lower_bound(make_potential(base, draws[i].v), base);
    r.rows[i] = {b.negative_part, b.positive_part, b.distance, b.margin()};
  });
  auto& dist = add_check(r, "distance_bound", 1e-6);
  for (int i = 0; i < n; ++i) {
    r.descriptors.push_back(describe("v", draws[i].coefficients));
    dist.margins.push_back(r.rows[i][3]);
    r.plots["margins"].emplace_back(i, r.rows[i][3]);
  }

  // Strip solutions: the oracle pair first, then random pairs.
  if (!config.eps.empty()) {
    std::vector<std::pair<SymplecticPotential, SymplecticPotential>> strip_pairs;
    strip_pairs.emplace_back(base, make_potential(base, bubble(P) * 0.05));
    for (int k = 0; k < pairs; ++k)
      strip_pairs.emplace_back(make_potential(base, strip_draws[2 * k].v), make_potential(base, strip_draws[2 * k + 1].v));
    std::vector<std::vector<StripSolution>> sols(strip_pairs.size());
    parallel_for(sols.size(), workers_of(config), [&](std::size_t k) {
      sols[k] = solve_hcma_sequence(strip_pairs[k].first, strip_pairs[k].second, config.T, config.eps, config.strip);
    });
    auto& monitor = add_check(r, "strip_monitor", 0.0);
    auto& residual = add_check(r, "strip_residual", 0.0);
    auto& convergence = add_check(r, "strip_convergence", 0.0);
    auto& final_error = add_check(r, "strip_final_error", 0.0);
    for (std::size_t k = 0; k < sols.size(); ++k) {
      double previous = INFINITY;
      for (const auto& s : sols[k]) {
        monitor.margins.push_back(0.02 - s.monitor.excess);
        residual.margins.push_back(config.strip.tolerance - s.residual);
        if (k > 0) continue;
        const double err = strip_error(s, strip_pairs[0].first, strip_pairs[0].second);
        if (std::isfinite(previous)) convergence.margins.push_back(previous - err);
        previous = err;
        r.plots["eps_convergence"].emplace_back(s.eps, err);
        r.plots["strip_monitor_excess"].emplace_back(s.eps, s.monitor.excess);
        final_error.margins = {0.05 - err / s.range()};
        r.summary["strip_cells_t"] = s.cells_t;
        r.summary["strip_cells_s"] = s.cells_s;
        r.summary["strip_s_max"] = s.s_max;
      }
    }
    if (convergence.margins.empty()) convergence.margins.push_back(0.0);
  }
  r.samples = n;
  finish(r, t0);
  return r;
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"thm12", "lemma43", "calabi_bound", "monitors"};
  return ids;
}

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config) {
  if (id == "thm12") return run_thm12(config);
  if (id == "lemma43") return run_lemma43(config);
  if (id == "calabi_bound") return run_calabi_bound(config);
  if (id == "monitors") return run_estimate_monitors(config);
  throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + id + "'");
}

RefinementReport compare_refinement(const ExperimentReport& coarse, const ExperimentReport& fine) {
  RefinementReport rep;
  if (coarse.checks.size() != fine.checks.size())
    throw Error(ErrorKind::GridMismatch, "refinement run produced a different set of checks");
  for (std::size_t c = 0; c < coarse.checks.size(); ++c) {
    const auto& a = coarse.checks[c];
    const auto& b = fine.checks[c];
    if (a.name != b.name || a.margins.size() != b.margins.size())
      throw Error(ErrorKind::GridMismatch, "refinement run differs in check '" + a.name + "'");
    if (a.pass() != b.pass()) rep.verdicts_match = false;
    double& mine = rep.worsening[a.name];
    for (std::size_t i = 0; i < a.margins.size(); ++i) {
      const double worse = a.margins[i] - b.margins[i];
      mine = std::max(mine, worse);
      if (worse > rep.worst_worsening) {
        rep.worst_worsening = worse;
        rep.worst_check = a.name;
      }
    }
  }
  return rep;
}

ExperimentReport run_with_refinement(const std::string& id, const ExperimentConfig& config) {
  auto coarse = run_experiment(id, config);
  const auto fine = run_experiment(id, config.refined());
  coarse.refinement = compare_refinement(coarse, fine);
  return coarse;
}

}  // namespace mabuchi
