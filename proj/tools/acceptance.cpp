// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mabuchi/experiments.hpp"
#include "mabuchi/report.hpp"

using namespace mabuchi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void line(int id, bool pass, const std::string& title, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

const Check& need(const ExperimentReport& r, const std::string& name) {
  const Check* c = r.find(name);
  if (!c) throw Error(ErrorKind::InvalidArgument, r.id + " has no check " + name);
  return *c;
}

std::string describe(const Check& c) { return c.name + " " + g(c.margin()) + (c.pass() ? "" : " (violated)"); }

ExperimentConfig battery(const std::string& polytope, int n) {
  ExperimentConfig c;
  c.polytope = polytope;
  c.n = n;
  c.seed = 7;
  return c;
}

std::vector<SymplecticPotential> random_metrics(const SymplecticPotential& base, int count, std::uint64_t seed) {
  RandomPotentialSampler sampler(base.polytope());
  Rng rng(seed);
  std::vector<SymplecticPotential> out;
  for (int i = 0; i < count; ++i) out.push_back(make_potential(base, sampler.draw(rng)));
  return out;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, ExperimentReport>> refined;

  {
    const auto t0 = Clock::now();
    GridOptions go;
    go.h = 1.0 / 64;
    const auto u = guillemin_potential(make_discretization("P1", go));
    const auto cf = scalar_curvature(u);
    const double ca = calabi_energy(u.disc(), cf);
    double dev = 0.0;
    for (double s : cf.S) dev = std::max(dev, std::abs(s - 4.0));
    const double t = seconds_since(t0);
    line(1, ca <= 1e-6 && dev <= 1e-4 && t < 1.0, "round-metric zero",
         "Ca=" + g(ca) + " sup|S-4|=" + g(dev) + " " + g(t) + "s");
  }

  {
    const auto t0 = Clock::now();
    const auto d = make_discretization("PF1");
    const auto base = guillemin_potential(d);
    const AffineField x(Vec::Unit(2, 0), 0.0);
    // S_bar = 20/3, int_P x dx = 2/3, int_dP x dsigma = 2.
    const double oracle = 20.0 / 3.0 * (2.0 / 3.0) - 2.0 * 2.0;
    double lo = INFINITY, hi = -INFINITY, worst = 0.0;
    for (const auto& u : random_metrics(base, 5, 101)) {
      const double F = futaki_invariant(x, u);
      lo = std::min(lo, F);
      hi = std::max(hi, F);
      worst = std::max(worst, std::abs(F - oracle));
    }
    const double spread = (hi - lo) / std::abs(oracle);
    const double t = seconds_since(t0);
    line(2, spread <= 1e-5 && worst <= 1e-5 && t < 30.0, "Futaki class-invariance",
         "F(x)=" + g(hi) + " oracle 4/9, relative spread " + g(spread) + ", |F-oracle|<=" + g(worst) + " " + g(t) +
             "s");
  }

  {
    const auto d = make_discretization("PF1");
    const auto base = guillemin_potential(d);
    const auto& P = d->polytope();
    const std::vector<AffineField> basis{AffineField(Vec::Unit(2, 0), 0.0).normalized(P),
                                         AffineField(Vec::Unit(2, 1), 0.0).normalized(P)};
    std::vector<Eigen::Matrix2d> grams;
    for (const auto& u : random_metrics(base, 5, 202)) {
      Eigen::Matrix2d G;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) G(i, j) = fm_inner(basis[i], basis[j], u);
      grams.push_back(G);
    }
    double diff = 0.0, min_eig = INFINITY;
    for (const auto& G : grams) {
      diff = std::max(diff, (G - grams.front()).cwiseAbs().maxCoeff());
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(G).eigenvalues().minCoeff());
    }
    line(3, diff <= 1e-5 && min_eig > 0.0, "Futaki-Mabuchi Gram invariance",
         "max entry difference " + g(diff) + ", min eigenvalue " + g(min_eig));
  }

  {
    const auto t0 = Clock::now();
    const auto r = run_with_refinement("calabi_bound", battery("PF1", 100));
    const double t = seconds_since(t0);
    bool ok = t < 300.0;
    std::string detail;
    for (const char* name : {"calabi_bound", "hwang_decomposition", "hwang_cauchy_schwarz", "hwang_rho_equals_futaki"}) {
      ok = ok && need(r, name).pass();
      detail += describe(need(r, name)) + ", ";
    }
    line(4, ok, "Calabi lower bound on PF1 (100 metrics)", detail + g(t) + "s with h/2");
    refined.emplace_back("calabi_bound PF1", r);
  }

  {
    const auto t0 = Clock::now();
    const auto p1 = run_with_refinement("thm12", battery("P1", 50));
    const auto pf1 = run_with_refinement("thm12", battery("PF1", 25));
    const double t = seconds_since(t0);
    bool ok = t < 300.0;
    std::string detail;
    for (const auto* r : {&p1, &pf1})
      for (const char* name : {"thm12_forward", "thm12_reverse"}) {
        ok = ok && need(*r, name).pass() && need(*r, name).margins.size() == static_cast<std::size_t>(r->samples);
        detail += r->polytope + " " + describe(need(*r, name)) + ", ";
      }
    line(5, ok && p1.samples == 50 && pf1.samples == 25, "energy-distance-Calabi battery", detail + g(t) + "s with h/2");
    refined.emplace_back("thm12 P1", p1);
    refined.emplace_back("thm12 PF1", pf1);
  }

  {
    const auto r = run_with_refinement("lemma43", battery("P1", 50));
    const auto& mono = need(r, "lemma43_monotone");
    const auto& end = need(r, "lemma43_endpoint");
    line(6, mono.pass() && end.pass() && r.samples == 50, "K-energy slope monotone along geodesics",
         describe(mono) + ", " + describe(end));
    refined.emplace_back("lemma43 P1", r);
  }

  std::vector<MonitorReport> monitors;
  {
    const auto t0 = Clock::now();
    GridOptions go;
    go.h = 1.0 / 64;
    const auto d = make_discretization("P1", go);
    const auto u0 = guillemin_potential(d);
    const auto u1 = make_potential(u0, bubble(d->polytope()) * 0.05);
    StripOptions o;
    o.cells_t = 64;
    o.cells_s = 64;
    const auto sols = solve_hcma_sequence(u0, u1, 1.0, {1e-1, 1e-2, 1e-3}, o);
    std::vector<double> errors;
    double worst_residual = 0.0;
    for (const auto& s : sols) {
      errors.push_back(strip_error(s, u0, u1));
      worst_residual = std::max(worst_residual, s.residual);
      monitors.push_back(s.monitor);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
    const double rel = errors.back() / sols.back().range();
    const double t = seconds_since(t0);
    line(7, monotone && rel <= 5e-2 && worst_residual <= 1e-10 && t < 120.0, "eps-solver oracle convergence",
         "errors " + g(errors[0]) + " > " + g(errors[1]) + " > " + g(errors[2]) + ", final/range " + g(rel) +
             ", max residual " + g(worst_residual) + " " + g(t) + "s");
  }

  const auto mon = run_with_refinement("monitors", battery("P1", 50));
  refined.emplace_back("monitors P1", mon);
  {
    double worst = -INFINITY;
    for (const auto& m : monitors) worst = std::max(worst, m.excess);
    const auto& strip = need(mon, "strip_monitor");
    worst = std::max(worst, 0.02 - strip.margin());
    line(8, strip.pass() && worst <= 0.02, "strip monitor attains its maximum on the boundary",
         "worst excess " + g(100 * worst) + "% over " + std::to_string(monitors.size() + strip.margins.size()) +
             " solutions (limit 2%)");
  }
  {
    const auto& u = need(mon, "exhaustion_uniformity");
    const auto& c = need(mon, "exhaustion_cauchy");
    const auto& o = need(mon, "exhaustion_parallel_oracle");
    line(9, u.pass() && c.pass() && o.pass(), "exhaustion uniformity and Cauchy windows",
         "uniformity " + g(mon.summary.at("exhaustion_uniformity")) + ", parallel constant " +
             g(mon.summary.at("parallel_constant")) + " (closed form 0.05), " + describe(c));
  }
  {
    const auto& id = need(mon, "yen_identity");
    const auto& k = need(mon, "yen_constant");
    line(10, id.pass() && k.pass(), "yen integrand equals the Futaki value", describe(id) + ", " + describe(k));
  }
  {
    const auto& b = need(mon, "distance_bound");
    line(11, b.pass() && b.margins.size() == 50, "geodesic-distance lower bound",
         describe(b) + " over " + std::to_string(b.margins.size()) + " potentials");
  }
  {
    bool ok = true;
    std::string detail;
    for (const auto& [name, r] : refined) {
      const auto& rep = *r.refinement;
      ok = ok && rep.pass();
      detail += name + (rep.pass() ? " ok " : " FAILED ") + g(rep.worst_worsening) +
                (rep.worst_check.empty() ? "" : " (" + rep.worst_check + ")") +
                (rep.verdicts_match ? "" : " verdict changed") + "; ";
    }
    line(12, ok, "discretization honesty at h/2", detail.substr(0, detail.size() - 2));
  }

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
