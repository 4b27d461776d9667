#include "mabuchi/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mabuchi/config.hpp"
#include "mabuchi/experiments.hpp"
#include "mabuchi/report.hpp"

namespace mabuchi {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Sections are only for readability: "[grid] h = 0.01" and "h = 0.01" mean the same.
class FlatIni : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items;
    for (auto& item : CLI::ConfigINI::from_config(input)) {
      if (item.name == "++" || item.name == "--") continue;
      item.parents.clear();
      items.push_back(std::move(item));
    }
    return items;
  }
};

struct OptionSpec {
  const char* key;
  const char* help;
};

const std::vector<OptionSpec>& option_specs() {
  static const std::vector<OptionSpec> specs{
      {"polytope", "P1, P2 or PF1, or a label for custom facets"},
      {"facets", "custom polytope: 'n1 [n2] offset | ...' with primitive integer normals"},
      {"h", "grid spacing (0: 1/64 in 1D, 1/48 in 2D)"},
      {"order", "Gauss points per cell and axis (0: default)"},
      {"s_max", "strip half-width in log coordinates (0: from the potentials)"},
      {"eps", "regularization schedule, strictly decreasing, in (0, 1]"},
      {"tolerance", "Newton residual tolerance"},
      {"max_newton", "Newton iterations per stage"},
      {"cells_t", "strip cells in t"},
      {"cells_s", "strip cells per s-axis (0: 64 in 1D, 16 in 2D)"},
      {"lambda", "fixed monitor weight (default: 1 - C from the measured curvature)"},
      {"experiment", "battery id: thm12, lemma43, calabi_bound, monitors"},
      {"n", "samples (0: battery default)"},
      {"seed", "random seed"},
      {"T_list", "exhaustion lengths, strictly increasing"},
      {"T", "strip length"},
      {"workers", "worker threads (0: processor count)"},
      {"potential", "guillemin, bubble:<c> or random:<k>"},
      {"u0", "first endpoint (same syntax as potential)"},
      {"u1", "second endpoint (same syntax as potential)"},
      {"direction", "affine field a (default: first coordinate)"},
      {"t_max", "ray length"},
      {"samples", "time samples along paths and rays"},
      {"out", "output directory (MABUCHI_LAB_OUT overrides)"},
  };
  return specs;
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> help{
      {"functionals", "scalar curvature, Calabi energy, entropy and J of one potential"},
      {"geodesic", "exact geodesic between u0 and u1: distance, K-energy change, residuals"},
      {"ray", "affine ray: Calabi trace, yen integrand, exhaustion and tamed monitors"},
      {"solve-hcma", "regularized strip solver between u0 and u1 over the eps schedule"},
      {"futaki", "Futaki invariant, Futaki-Mabuchi Gram matrix, extremal field and Calabi bound"},
      {"battery", "run one experiment battery (see --experiment)"},
      {"monitors", "run the estimate-monitor battery"},
  };
  return help;
}

SymplecticPotential resolve_potential(const std::string& spec, const SymplecticPotential& base, std::uint64_t seed) {
  if (spec == "guillemin") return base;
  if (spec.rfind("bubble:", 0) == 0) return make_potential(base, bubble(base.polytope()) * std::stod(spec.substr(7)));
  const int k = std::stoi(spec.substr(7));
  RandomPotentialSampler sampler(base.polytope());
  Rng rng(seed);
  Poly v = sampler.draw(rng);
  for (int i = 0; i < k; ++i) v = sampler.draw(rng);
  return make_potential(base, v);
}

AffineField direction_of(const RunConfig& c, int dim) {
  Vec a = Vec::Zero(dim);
  if (c.direction.empty())
    a(0) = 1.0;
  else
    for (int i = 0; i < dim; ++i) a(i) = c.direction[static_cast<std::size_t>(i)];
  return {a, 0.0};
}

ExperimentReport start(const RunConfig& c, const Discretization& d) {
  ExperimentReport r;
  r.id = c.command;
  r.polytope = d.polytope().name();
  r.seed = c.seed;
  r.h = d.grid().h;
  r.order = d.grid().order;
  r.checks.reserve(8);
  return r;
}

Check& add_check(ExperimentReport& r, const std::string& name, double tolerance, double margin) {
  r.checks.push_back(Check{name, tolerance, {margin}});
  return r.checks.back();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string verdict(const ExperimentReport& r) {
  if (r.checks.empty()) return "";
  return std::string(r.pass() ? " PASS" : " FAIL") + " worst_slack=" + num(r.worst_slack());
}

DiscretizationPtr discretization_of(const RunConfig& c) {
  GridOptions g;
  g.h = c.h;
  g.order = c.order;
  return make_discretization(c.resolve_polytope(), g);
}

std::string run_functionals(const RunConfig& c, ExperimentReport& r) {
  const auto d = discretization_of(c);
  const auto base = guillemin_potential(d);
  const auto u = resolve_potential(c.potential, base, c.seed);
  r = start(c, *d);
  const CurvatureField cf = scalar_curvature(u);
  const double ca = calabi_energy(*d, cf);
  const auto bound = distance_lower_bound(u, base);
  r.summary = {{"calabi", ca},
               {"S_bar", cf.S_bar},
               {"sup_deviation", cf.sup_deviation()},
               {"entropy", entropy(u, base)},
               {"j_functional", j_functional(u, base)},
               {"distance_to_guillemin", bound.distance},
               {"min_hessian_eigenvalue", u.admissibility().min_eigenvalue}};
  add_check(r, "distance_bound", 1e-6, bound.margin());
  const auto& pts = d->grid().points;
  r.columns = d->dimension() == 1 ? std::vector<std::string>{"x", "S", "residual"}
                                  : std::vector<std::string>{"x", "y", "S", "residual"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> row(pts[i].data(), pts[i].data() + pts[i].size());
    row.push_back(cf.S[i]);
    row.push_back(cf.residual[i]);
    r.rows.push_back(row);
    r.descriptors.push_back(c.potential);
    if (d->dimension() == 1) r.plots["scalar_curvature"].emplace_back(pts[i](0), cf.S[i]);
  }
  return "functionals " + r.polytope + " " + c.potential + ": Ca=" + num(ca) + " S_bar=" + num(cf.S_bar) +
         " sup|S-S_bar|=" + num(cf.sup_deviation());
}

std::string run_geodesic(const RunConfig& c, ExperimentReport& r) {
  const auto d = discretization_of(c);
  const auto base = guillemin_potential(d);
  const auto u0 = resolve_potential(c.u0, base, c.seed);
  const auto u1 = resolve_potential(c.u1, base, c.seed);
  r = start(c, *d);
  const GeodesicSegment seg = exact_geodesic(u0, u1, c.samples);
  const double dist = geodesic_distance(u0, u1);
  const double dE = k_energy_delta(seg.path);
  const double ca1 = calabi_energy(u1);
  const IFunctionalResult I = i_functional(seg.path);
  r.summary = {{"distance", dist},
               {"delta_E", dE},
               {"calabi_1", ca1},
               {"thm12_margin", dist * std::sqrt(ca1) - dE},
               {"geodesic_residual", geodesic_residual(seg)},
               {"kahler_linear_residual", kahler_linear_residual(u0, u1, c.samples)}};
  add_check(r, "thm12", 1e-4, dist * std::sqrt(ca1) - dE);
  r.columns = {"t", "speed", "I", "dE_dt"};
  const auto& ts = seg.path.times();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    r.rows.push_back({ts[i], seg.speeds[i], I.values[i], k_energy_rate(seg.path, ts[i])});
    r.descriptors.push_back(c.u0 + "->" + c.u1);
    r.plots["k_energy_rate"].emplace_back(ts[i], r.rows.back()[3]);
  }
  return "geodesic " + r.polytope + " " + c.u0 + " -> " + c.u1 + ": d=" + num(dist) + " dE=" + num(dE) +
         " margin=" + num(r.summary["thm12_margin"]);
}

std::string run_ray(const RunConfig& c, ExperimentReport& r) {
  const auto d = discretization_of(c);
  const auto base = guillemin_potential(d);
  const auto u = resolve_potential(c.potential, base, c.seed);
  const auto start_u = resolve_potential(c.u0, base, c.seed);
  r = start(c, *d);
  const GeodesicRay ray = ray_from_affine(u, direction_of(c, d->dimension()), c.t_max, c.samples);
  const YenTrace yen = yen_invariant(ray, false, INFINITY);
  const EffectivenessProfile eff = effectiveness_profile(ray);
  const ExhaustionReport ex = ray_by_exhaustion(start_u, ray, c.T_list);
  const TamedReport tamed = tamed_diagnostics(ray, ambient_of(ray, true));
  r.summary = {{"yen_limit", yen.limit},
               {"yen_worst_step", yen.worst_step},
               {"t2_calabi_slope", eff.slope},
               {"exhaustion_uniformity", ex.uniformity},
               {"parallel_constant", ex.parallel_constant},
               {"tamed_trace_max", tamed.trace_max},
               {"tamed_time_max", tamed.time_max}};
  add_check(r, "yen_monotone", 1e-6, yen.worst_step);
  add_check(r, "exhaustion_uniformity", 1e-5, -ex.uniformity);
  add_check(r, "exhaustion_cauchy", 0.0, ex.cauchy ? 0.0 : -1.0);
  r.columns = {"t", "Ca", "yen_integrand", "t2Ca", "tamed_trace", "tamed_time"};
  const auto& ts = ray.times();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    r.rows.push_back({ts[i], ray.calabi[i], ray.yen_integrand[i], eff.t2_calabi[i], tamed.trace_term[i],
                      tamed.time_term[i]});
    r.descriptors.push_back(c.potential);
    r.plots["yen_integrand"].emplace_back(ts[i], ray.yen_integrand[i]);
    r.plots["t2_calabi"].emplace_back(ts[i], eff.t2_calabi[i]);
  }
  for (std::size_t k = 0; k < ex.T_list.size(); ++k) r.plots["exhaustion_monitor"].emplace_back(ex.T_list[k], ex.monitor[k]);
  return "ray " + r.polytope + " " + c.potential + ": yen=" + num(yen.limit) + " t2Ca " + to_string(eff.verdict) +
         " exhaustion_uniformity=" + num(ex.uniformity);
}

std::string run_solve_hcma(const RunConfig& c, ExperimentReport& r, const fs::path& dir) {
  const auto d = discretization_of(c);
  const auto base = guillemin_potential(d);
  const auto u0 = resolve_potential(c.u0, base, c.seed);
  const auto u1 = resolve_potential(c.u1, base, c.seed);
  r = start(c, *d);
  const ExperimentConfig e = c.experiment_config();
  const auto sols = solve_hcma_sequence(u0, u1, c.T, c.eps, e.strip);
  r.eps_schedule = c.eps;
  r.s_max = sols.back().s_max;
  r.columns = {"eps", "residual", "newton_iterations", "stages", "error", "relative_error", "monitor_excess",
               "lambda", "curvature", "min_hessian_eigenvalue"};
  std::vector<double> errors;
  double worst_excess = -INFINITY, worst_residual = 0.0;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : sols) {
    const double err = strip_error(s, u0, u1);
    errors.push_back(err);
    worst_excess = std::max(worst_excess, s.monitor.excess);
    worst_residual = std::max(worst_residual, s.residual);
    r.rows.push_back({s.eps, s.residual, static_cast<double>(s.newton_iterations), static_cast<double>(s.stages), err,
                      err / s.range(), s.monitor.excess, s.monitor.lambda, s.monitor.curvature,
                      s.min_hessian_eigenvalue});
    r.descriptors.push_back(c.u0 + "->" + c.u1);
    r.plots["eps_convergence"].emplace_back(s.eps, err);
    r.plots["strip_monitor_excess"].emplace_back(s.eps, s.monitor.excess);
    stages.push_back({{"eps", s.eps},
                      {"residual", s.residual},
                      {"newton_iterations", s.newton_iterations},
                      {"monitor", {{"lambda", s.monitor.lambda},
                                   {"curvature", std::isnan(s.monitor.curvature) ? nlohmann::json(nullptr)
                                                                                   : nlohmann::json(s.monitor.curvature)},
                                   {"interior_max", s.monitor.interior_max},
                                   {"boundary_max", s.monitor.boundary_max},
                                   {"excess", s.monitor.excess}}}});
  }
  add_check(r, "strip_residual", 0.0, c.tolerance - worst_residual);
  // A user-fixed lambda is reported without a verdict.
  if (!c.lambda) add_check(r, "strip_monitor", 0.0, 0.02 - worst_excess);
  double mono = 0.0;
  for (std::size_t i = 1; i < errors.size(); ++i) mono = std::min(mono, errors[i - 1] - errors[i]);
  add_check(r, "strip_convergence", 0.0, mono);
  add_check(r, "strip_final_error", 0.0, 0.05 - errors.back() / sols.back().range());
  r.summary = {{"final_error", errors.back()}, {"final_relative_error", errors.back() / sols.back().range()},
               {"worst_monitor_excess", worst_excess}, {"worst_residual", worst_residual}};

  const StripSolution& last = sols.back();
  fs::create_directories(dir);
  std::ofstream bin(dir / "strip.bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(last.values.data()),
            static_cast<std::streamsize>(last.values.size() * sizeof(double)));
  const nlohmann::json sidecar{{"T", last.T},
                               {"eps", last.eps},
                               {"n", last.n},
                               {"cells_t", last.cells_t},
                               {"cells_s", last.cells_s},
                               {"s_max", last.s_max},
                               {"layout", "float64 little-endian, t fastest, then s"},
                               {"values", "strip.bin"},
                               {"config_hash", c.hash()},
                               {"stages", stages}};
  write_text(dir / "strip.json", sidecar.dump(2) + "\n");
  return "solve-hcma " + r.polytope + " " + c.u0 + " -> " + c.u1 + ": final_error/range=" +
         num(r.summary["final_relative_error"]) + " monitor_excess=" + num(worst_excess) +
         " residual=" + num(worst_residual);
}

std::string run_futaki(const RunConfig& c, ExperimentReport& r) {
  const auto d = discretization_of(c);
  const auto base = guillemin_potential(d);
  const auto u = resolve_potential(c.potential, base, c.seed);
  r = start(c, *d);
  const AffineField f = direction_of(c, d->dimension());
  const double F = futaki_invariant(f, u);
  const double Fb = futaki_boundary_value(f, *d);
  const ExtremalField klass = extremal_field(*d);
  const ExtremalField local = extremal_field(u);
  const HwangReport hw = hwang_bound(u);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(klass.gram);
  r.summary = {{"futaki", F},
               {"futaki_boundary", Fb},
               {"futaki_extremal", klass.futaki_value},
               {"calabi", hw.calabi},
               {"hwang_margin", hw.margin()},
               {"gram_min_eigenvalue", es.eigenvalues().minCoeff()}};
  add_check(r, "futaki_boundary_agreement", 1e-5, -std::abs(F - Fb));
  add_check(r, "calabi_bound", 1e-5, hw.margin());
  add_check(r, "gram_positive", 0.0, es.eigenvalues().minCoeff());
  r.columns = {"futaki_class", "futaki_quadrature", "extremal_coefficient", "gram_diagonal"};
  for (int i = 0; i < klass.coefficients.size(); ++i) {
    r.rows.push_back({klass.futaki_values(i), local.futaki_values(i), klass.coefficients(i), klass.gram(i, i)});
    r.descriptors.push_back("x" + std::to_string(i + 1) + "-mean");
  }
  return "futaki " + r.polytope + " " + c.potential + ": F=" + num(F) + " F_boundary=" + num(Fb) +
         " F_Xc=" + num(klass.futaki_value) + " Ca=" + num(hw.calabi);
}

std::string run_battery(const RunConfig& c, const std::string& id, ExperimentReport& r) {
  const ExperimentConfig e = c.experiment_config();
  r = c.refine ? run_with_refinement(id, e) : run_experiment(id, e);
  std::string line = c.command + " " + id + " " + r.polytope + " n=" + std::to_string(r.samples) + ":" + verdict(r);
  if (r.refinement)
    line += std::string(" refinement=") + (r.refinement->pass() ? "ok" : "FAIL") +
            " worst_worsening=" + num(r.refinement->worst_worsening);
  return line;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toric K-energy, Calabi and geodesic experiments"};
  app.name("mabuchi_lab");
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1, 1);
  std::map<std::string, std::vector<std::string>> raw;
  for (const auto& spec : option_specs()) app.add_option(std::string("--") + spec.key, raw[spec.key], spec.help)->type_name("VALUE");
  bool refine = false;
  app.add_flag("--refine", refine, "repeat at h/2 and compare margins");
  app.set_config("--config", "", "key = value file; [sections] are optional; flags win");
  app.config_formatter(std::make_shared<FlatIni>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  for (const auto& name : command_names()) app.add_subcommand(name, command_help().at(name))->fallthrough();

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  RunConfig config;
  try {
    std::map<std::string, std::string> values;
    for (const auto& [key, tokens] : raw) {
      if (tokens.empty()) continue;
      std::string joined;
      for (std::size_t i = 0; i < tokens.size(); ++i) joined += (i ? " " : "") + tokens[i];
      values[key] = joined;
    }
    if (refine) values["refine"] = "true";
    config = build_run_config(app.get_subcommands().front()->get_name(), values);
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) err << "config error: " << p << "\n";
    return 2;
  }

  fs::path dir = config.out;
  if (const char* env = std::getenv("MABUCHI_LAB_OUT"); env && *env) dir = env;

  const auto t0 = Clock::now();
  try {
    ExperimentReport report;
    std::string line;
    if (config.command == "functionals")
      line = run_functionals(config, report);
    else if (config.command == "geodesic")
      line = run_geodesic(config, report);
    else if (config.command == "ray")
      line = run_ray(config, report);
    else if (config.command == "solve-hcma")
      line = run_solve_hcma(config, report, dir);
    else if (config.command == "futaki")
      line = run_futaki(config, report);
    else if (config.command == "battery")
      line = run_battery(config, config.experiment, report);
    else
      line = run_battery(config, "monitors", report);
    if (report.seconds == 0.0) report.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (config.command != "battery" && config.command != "monitors") line += verdict(report);
    write_report(report, dir, config.hash(), config.canonical());
    out << line << " -> " << dir.string() << "\n";
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mabuchi
