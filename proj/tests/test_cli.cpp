#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mabuchi/cli.hpp"
#include "mabuchi/config.hpp"

using namespace mabuchi;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mabuchi_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mabuchi_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> problems_of(const std::string& command, const std::map<std::string, std::string>& values) {
  try {
    build_run_config(command, values);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& field) {
  for (const auto& p : problems)
    if (p.rfind(field + ":", 0) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("defaults validate") {
  const auto c = build_run_config("battery", {});
  CHECK(c.polytope == "P1");
  CHECK(c.eps == std::vector<double>{1e-1, 1e-2, 1e-3});
  CHECK(c.seed == 7);
  CHECK_FALSE(c.lambda);
}

TEST_CASE("every invalid field is reported at once") {
  const auto p = problems_of("solve-hcma", {{"eps", "1e-2, 0"},
                                            {"h", "-1"},
                                            {"cells_t", "2"},
                                            {"seed", "abc"},
                                            {"experiment", "thm99"},
                                            {"T_list", "4, 2"},
                                            {"u1", "sphere"},
                                            {"colour", "red"}});
  for (const char* field : {"eps", "h", "cells_t", "seed", "experiment", "T_list", "u1", "colour"})
    CHECK_MESSAGE(mentions(p, field), field);
  CHECK(p.size() == 8);
}

TEST_CASE("field validation") {
  CHECK(mentions(problems_of("battery", {{"eps", "1e-1, 1e-1"}}), "eps"));
  CHECK(mentions(problems_of("battery", {{"eps", "2"}}), "eps"));
  CHECK(mentions(problems_of("battery", {{"polytope", "P7"}}), "polytope"));
  CHECK(mentions(problems_of("battery", {{"direction", "1 2"}}), "direction"));
  CHECK(mentions(problems_of("battery", {{"polytope", "PF1"}, {"direction", "0 0"}}), "direction"));
  CHECK(mentions(problems_of("battery", {{"refine", "maybe"}}), "refine"));
  CHECK(mentions(problems_of("battery", {{"lambda", "nan"}}), "lambda"));
  CHECK(mentions(problems_of("dance", {}), "command"));
  CHECK(problems_of("battery", {{"polytope", "PF1"}, {"direction", "1 0.5"}, {"lambda", "3"}}).empty());
}

TEST_CASE("custom facets") {
  const auto f = parse_facets("1 0 0 | 0 1 0 ; -1 -1 -3/2");
  REQUIRE(f.size() == 3);
  CHECK(f[2].normal(1) == -1);
  CHECK(f[2].offset == -1.5);
  CHECK_THROWS_AS(parse_facets("1"), Error);
  CHECK_THROWS_AS(parse_facets(" | "), Error);
  CHECK_THROWS_AS(parse_facets("1.5 0 0"), Error);
  CHECK_THROWS_AS(parse_facets("1 0 x"), Error);
  const auto c = build_run_config("futaki", {{"polytope", "tri"}, {"facets", "1 0 0 | 0 1 0 | -1 -1 -1"}});
  CHECK(c.resolve_polytope().volume() == doctest::Approx(0.5));
  CHECK(mentions(problems_of("futaki", {{"facets", "1 0 0 | 0 1 0 | -1 -2 -2"}}), "facets"));
}

TEST_CASE("config hash depends on values, not spelling") {
  const auto a = build_run_config("battery", {{"eps", "0.1,0.01"}, {"seed", "3"}});
  const auto b = build_run_config("battery", {{"eps", "1e-1 1e-2"}, {"seed", "3"}, {"out", "elsewhere"}});
  const auto c = build_run_config("battery", {{"eps", "1e-1 1e-2"}, {"seed", "4"}});
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.canonical().find("seed = 3\n") != std::string::npos);
}

TEST_CASE("functionals on the round metric") {
  const auto dir = scratch("functionals");
  const auto r = run({"functionals", "--polytope", "P1", "--potential", "guillemin", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("S_bar=4 ") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["summary"]["calabi"].get<double>() < 1e-6);
  CHECK(fs::exists(dir / "plotdata" / "scalar_curvature.csv"));
  fs::remove_all(dir);
}

TEST_CASE("battery writes JSON and CSV reports") {
  const auto dir = scratch("battery");
  const auto r = run({"battery", "--experiment", "thm12", "--polytope", "P1", "--n", "50", "--seed", "7", "--out",
                      dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["samples"] == 50);
  CHECK(j["pass"] == true);
  const std::string hash = j["metadata"]["config_hash"];
  const std::string csv = slurp(dir / "samples.csv");
  CHECK(csv.rfind("# config_hash=" + hash + "\n", 0) == 0);
  CHECK(slurp(dir / "checks.csv").find(hash) != std::string::npos);

  const auto again = scratch("battery_again");
  CHECK(run({"battery", "--experiment", "thm12", "--n", "50", "--out", again.string()}).code == 0);
  CHECK(slurp(again / "samples.csv") == csv);
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("exit codes") {
  SUBCASE("config error names the field") {
    const auto r = run({"solve-hcma", "--polytope", "P1", "--T", "1", "--eps", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("eps") != std::string::npos);
  }
  SUBCASE("several config errors") {
    const auto r = run({"solve-hcma", "--eps", "-1", "--cells_t", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("eps") != std::string::npos);
    CHECK(r.err.find("cells_t") != std::string::npos);
  }
  SUBCASE("unknown option and missing subcommand") {
    CHECK(run({"battery", "--bogus", "1"}).code == 2);
    CHECK(run({"--n", "3"}).code == 2);
    CHECK(run({"dance"}).code == 2);
  }
  SUBCASE("computation errors keep the module message") {
    const auto dir = scratch("notadmissible");
    const auto r = run({"functionals", "--potential", "bubble:5", "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("NotAdmissible: ", 0) == 0);
    fs::remove_all(dir);
  }
  SUBCASE("help") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("solve-hcma") != std::string::npos);
  }
}

TEST_CASE("config file with sections; flags win") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.ini");
    f << "[polytope]\npolytope = P1\n\n[experiment]\nexperiment = thm12\nn = 5\nseed = 11\n"
      << "[output]\nout = " << (dir / "a").string() << "\n";
  }
  CHECK(run({"battery", "--config", (dir / "run.ini").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "a" / "report.json"))["samples"] == 5);
  CHECK(run({"battery", "--config", (dir / "run.ini").string(), "--n", "3"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "a" / "report.json"))["samples"] == 3);
  {
    std::ofstream f(dir / "bad.ini");
    f << "wibble = 1\n";
  }
  CHECK(run({"battery", "--config", (dir / "bad.ini").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("environment overrides the output directory") {
  const auto dir = scratch("env");
  setenv("MABUCHI_LAB_OUT", dir.string().c_str(), 1);
  const auto r = run({"futaki", "--polytope", "PF1", "--out", "ignored"});
  unsetenv("MABUCHI_LAB_OUT");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK_FALSE(fs::exists("ignored"));
  fs::remove_all(dir);
}

TEST_CASE("strip solve writes the grid and its sidecar") {
  const auto dir = scratch("strip");
  const auto r = run({"solve-hcma", "--T", "1", "--eps", "1e-1,1e-2", "--cells_t", "32", "--cells_s", "32", "--out",
                      dir.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "strip.json"));
  const std::size_t nodes = 33 * 33;
  CHECK(fs::file_size(dir / "strip.bin") == nodes * sizeof(double));
  CHECK(j["stages"].size() == 2);
  CHECK(j["eps"].get<double>() == 1e-2);
  fs::remove_all(dir);
}
