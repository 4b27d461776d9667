#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mabuchi/geodesic.hpp"
#include "mabuchi/sampling.hpp"
#include "mabuchi/strip_solver.hpp"

namespace mabuchi {

/// One inequality verdict. margins holds the per-sample values (one entry for
/// aggregate checks); the verdict is min(margins) >= -tolerance.
struct Check {
  std::string name;
  double tolerance = 0.0;
  std::vector<double> margins;

  double margin() const;
  bool pass() const { return margin() >= -tolerance; }
};

/// Coarse run versus the run at h / 2, check by check and sample by sample.
struct RefinementReport {
  bool verdicts_match = true;
  double worst_worsening = 0.0;  // max over samples of coarse margin - fine margin
  std::string worst_check;
  std::map<std::string, double> worsening;  // per check, max over samples (>= 0)
  double limit = 1e-4;
  bool pass() const { return verdicts_match && worst_worsening <= limit; }
};

struct ExperimentReport {
  std::string id;
  std::string polytope;
  std::uint64_t seed = 0;
  int samples = 0;
  double acceptance_rate = 1.0;

  double h = 0.0;
  int order = 0;
  double s_max = 0.0;
  std::vector<double> eps_schedule;
  double seconds = 0.0;

  std::vector<std::string> descriptors;  // one per row
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Check> checks;
  std::map<std::string, std::vector<std::pair<double, double>>> plots;  // (x, y) series
  std::map<std::string, double> summary;
  std::optional<RefinementReport> refinement;

  bool pass() const;
  const Check* find(const std::string& name) const;
  /// Smallest margin + tolerance over all checks (>= 0 iff every verdict passes).
  double worst_slack() const;
};

struct ExperimentConfig {
  std::string polytope = "P1";
  std::vector<Facet> facets;  // custom polytope when non-empty
  double h = 0.0;             // 0 means the polytope default
  int order = 0;
  int n = 0;                  // samples; 0 means the battery default
  std::uint64_t seed = 7;
  int workers = 0;            // 0 means default_workers()
  double box = 0.0;           // sampler box; 0 means default_sample_box
  int time_nodes = kDefaultTimeNodes;
  std::vector<double> T_list{2.0, 4.0, 8.0};
  std::vector<double> ray_lengths{2.0, 4.0, 8.0};
  double T = 1.0;  // strip length
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  StripOptions strip;
  int strip_pairs = 2;   // random pairs solved in the monitor battery
  bool near_extremal = true;

  MomentPolytope resolve_polytope() const;
  DiscretizationPtr discretization() const;
  /// Same config at h / 2; strip cells are doubled with it (S_max follows h).
  ExperimentConfig refined() const;
};

/// d(u0, u1) sqrt(Ca(u1)) - (E(u1) - E(u0)) >= -1e-4 in both orientations.
ExperimentReport run_thm12(const ExperimentConfig& config);

/// t -> int phi_dot (R_bar - R) omega^n along exact geodesics: endpoint
/// inequality (slack 1e-5) and per-step monotonicity (slack 1e-6).
ExperimentReport run_lemma43(const ExperimentConfig& config);

/// Ca >= F_{X_c} link by link, the finite-l chain along the extremal ray,
/// and an optional near-extremal descent over x-only polynomials.
ExperimentReport run_calabi_bound(const ExperimentConfig& config);

/// Exhaustion uniformity, strip maximum-principle monitors and the
/// distance lower bound.
ExperimentReport run_estimate_monitors(const ExperimentConfig& config);

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config);
const std::vector<std::string>& experiment_ids();

RefinementReport compare_refinement(const ExperimentReport& coarse, const ExperimentReport& fine);

/// run_experiment at h and at h / 2; the coarse report carries the comparison.
ExperimentReport run_with_refinement(const std::string& id, const ExperimentConfig& config);

/// Near-extremal search on PF1-like polytopes: v = sum_k c_k x^{k+2}, k < 6,
/// damped Gauss-Newton on Ca = int (S - S_bar)^2 starting from v = 0.
struct NearExtremal {
  std::vector<double> coefficients;
  double calabi = 0.0;
  double futaki_extremal = 0.0;
  double relative_gap = 0.0;  // (Ca - F_{X_c}) / F_{X_c}
  int iterations = 0;
  std::vector<double> history;  // Ca per iteration
};

NearExtremal near_extremal_search(const SymplecticPotential& base, int iterations = 40);

}  // namespace mabuchi
