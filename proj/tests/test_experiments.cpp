#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mabuchi/experiments.hpp"
#include "mabuchi/report.hpp"

using namespace mabuchi;

namespace {

ExperimentConfig small(const std::string& polytope, int n) {
  ExperimentConfig c;
  c.polytope = polytope;
  c.n = n;
  return c;
}

std::vector<double> all_margins(const ExperimentReport& r) {
  std::vector<double> m;
  for (const auto& c : r.checks) m.insert(m.end(), c.margins.begin(), c.margins.end());
  return m;
}

ExperimentReport synthetic(std::vector<double> margins, double tolerance) {
  ExperimentReport r;
  r.checks.push_back(Check{"a", tolerance, std::move(margins)});
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("check verdicts keep the margin") {
  Check c{"x", 1e-4, {0.3, -5e-5, 0.1}};
  CHECK(c.margin() == -5e-5);
  CHECK(c.pass());
  c.margins.push_back(-2e-4);
  CHECK_FALSE(c.pass());
  ExperimentReport r;
  r.checks = {Check{"a", 0.0, {1.0}}, Check{"b", 1e-3, {-1e-4}}};
  CHECK(r.pass());
  CHECK(r.worst_slack() == doctest::Approx(9e-4));
  CHECK(r.find("b") == &r.checks[1]);
  CHECK(r.find("c") == nullptr);
}

TEST_CASE("trivial pair has zero energy-distance margin") {
  auto d = make_discretization("P1");
  auto u = make_potential(guillemin_potential(d), bubble(d->polytope()) * 0.1);
  CHECK(geodesic_distance(u, u) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(k_energy_delta(PotentialPath::linear(u, u, 2))) < 1e-14);
}

TEST_CASE("thm12 battery on P1 is deterministic and independent of the worker count") {
  auto c = small("P1", 8);
  c.workers = 1;
  const auto a = run_thm12(c);
  c.workers = 3;
  const auto b = run_thm12(c);
  CHECK(a.pass());
  CHECK(a.samples == 8);
  REQUIRE(a.rows.size() == 8);
  CHECK(all_margins(a) == all_margins(b));
  CHECK(a.descriptors == b.descriptors);
  CHECK(a.find("thm12_forward") != nullptr);
  CHECK(a.find("thm12_reverse") != nullptr);
  CHECK(a.acceptance_rate >= 0.5);
  c.seed = 8;
  CHECK(all_margins(run_thm12(c)) != all_margins(a));
}

TEST_CASE("lemma43 battery records endpoint, monotonicity and reversal") {
  const auto r = run_lemma43(small("P1", 5));
  CHECK(r.pass());
  for (const char* name : {"lemma43_endpoint", "lemma43_monotone", "lemma43_reverse"}) {
    const Check* c = r.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->margins.size() == 5);
  }
  CHECK(r.plots.count("margin_histogram") == 1);
}

TEST_CASE("calabi bound battery on PF1 with the finite-l chain and the near-extremal search") {
  auto c = small("PF1", 4);
  const auto r = run_calabi_bound(c);
  CHECK(r.pass());
  for (const char* name : {"calabi_bound", "hwang_decomposition", "hwang_cauchy_schwarz", "hwang_rho_equals_futaki",
                           "chain_endpoint", "chain_cauchy_schwarz", "chain_bound", "near_extremal_gap"})
    CHECK_MESSAGE(r.find(name) != nullptr, name);
  CHECK(r.find("chain_bound")->margins.size() == 4 * c.ray_lengths.size());
}

TEST_CASE("calabi bound on P1 has zero margin at the round metric") {
  auto c = small("P1", 3);
  c.near_extremal = false;
  const auto r = run_calabi_bound(c);
  CHECK(r.pass());
  auto d = make_discretization("P1");
  const auto hw = hwang_bound(guillemin_potential(d));
  CHECK(std::abs(hw.margin()) < 1e-9);
  CHECK(r.find("near_extremal_gap") == nullptr);
}

TEST_CASE("near-extremal search approaches F_{X_c} on PF1") {
  auto d = make_discretization("PF1");
  const auto ne = near_extremal_search(guillemin_potential(d));
  CHECK(ne.futaki_extremal == doctest::Approx(64.0 / 39.0).epsilon(1e-6));
  CHECK(ne.relative_gap >= -1e-5);
  CHECK(ne.relative_gap < 0.05);
  CHECK(ne.coefficients.size() == 6);
  for (std::size_t k = 1; k < ne.history.size(); ++k) CHECK(ne.history[k] <= ne.history[k - 1] * (1 + 1e-12));
}

TEST_CASE("estimate monitors on P1") {
  auto c = small("P1", 6);
  c.strip_pairs = 1;
  const auto r = run_estimate_monitors(c);
  CHECK(r.pass());
  CHECK(r.find("exhaustion_parallel_oracle")->margin() > -1e-12);
  CHECK(r.find("strip_monitor")->margins.size() == 2 * c.eps.size());
  CHECK(r.plots.at("eps_convergence").size() == c.eps.size());
  CHECK(r.summary.at("parallel_constant") == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("experiment dispatch") {
  CHECK(experiment_ids().size() == 4);
  CHECK(run_experiment("thm12", small("P1", 2)).id == "thm12");
  CHECK_THROWS_AS(run_experiment("nope", small("P1", 2)), Error);
}

TEST_CASE("refinement comparison") {
  SUBCASE("worsening is the largest per-sample decrease") {
    const auto rep = compare_refinement(synthetic({1.0, 0.5}, 0.0), synthetic({1.2, 0.4}, 0.0));
    CHECK(rep.verdicts_match);
    CHECK(rep.worst_worsening == doctest::Approx(0.1));
    CHECK(rep.worst_check == "a");
    CHECK(rep.worsening.at("a") == doctest::Approx(0.1));
    CHECK_FALSE(rep.pass());
  }
  SUBCASE("verdict flips are detected") {
    const auto rep = compare_refinement(synthetic({1e-5}, 0.0), synthetic({-1e-5}, 0.0));
    CHECK_FALSE(rep.verdicts_match);
    CHECK(rep.worst_worsening == doctest::Approx(2e-5));
  }
  SUBCASE("improvement is not worsening") {
    const auto rep = compare_refinement(synthetic({0.1}, 0.0), synthetic({0.2}, 0.0));
    CHECK(rep.worst_worsening == 0.0);
    CHECK(rep.pass());
  }
  SUBCASE("different check sets are rejected") {
    CHECK_THROWS_AS(compare_refinement(synthetic({0.1}, 0.0), synthetic({0.1, 0.2}, 0.0)), Error);
  }
  SUBCASE("thm12 on P1 at h/2") {
    const auto r = run_with_refinement("thm12", small("P1", 6));
    REQUIRE(r.refinement);
    CHECK(r.refinement->pass());
  }
}

TEST_CASE("refined configuration halves h and doubles the strip") {
  ExperimentConfig c;
  const auto f = c.refined();
  CHECK(f.h == doctest::Approx(1.0 / 128));
  CHECK(f.strip.cells_t == 2 * c.strip.cells_t);
  CHECK(f.strip.cells_s == 128);
  c.polytope = "PF1";
  CHECK(c.refined().strip.cells_s == 32);
}

TEST_CASE("shortest round-trip number format") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform(-300, 300)));
    const std::string s = format_number(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(4.0) == "4");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hash_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("reports are byte-identical across runs and name the config hash") {
  const auto a = run_thm12(small("P1", 4));
  const auto b = run_thm12(small("P1", 4));
  CHECK(samples_csv(a, "h") == samples_csv(b, "h"));
  CHECK(checks_csv(a, "h") == checks_csv(b, "h"));

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mabuchi_report_test";
  fs::remove_all(dir);
  const auto files = write_report(a, dir, "0123456789abcdef", "seed = 7\n");
  CHECK(files.size() == 3 + a.plots.size());
  for (const auto& f : files) {
    REQUIRE(fs::exists(f));
    CHECK(slurp(f).find("0123456789abcdef") != std::string::npos);
  }
  const std::string csv = slurp(dir / "samples.csv");
  CHECK(csv.rfind("# config_hash=0123456789abcdef\nindex,descriptor,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 4);
  double total = 0.0;
  for (const auto& [x, y] : a.plots.at("margin_histogram")) total += y;
  CHECK(total == a.plots.at("margins").size());
  fs::remove_all(dir);
}
