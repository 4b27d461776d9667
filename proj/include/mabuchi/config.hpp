#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mabuchi/errors.hpp"
#include "mabuchi/experiments.hpp"
#include "mabuchi/polytope.hpp"

namespace mabuchi {

/// Every invalid field of a configuration, collected before any computation.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

const std::vector<std::string>& command_names();

struct RunConfig {
  std::string command;

  // polytope
  std::string polytope = "P1";
  std::vector<Facet> facets;

  // grid
  double h = 0.0;
  int order = 0;
  double s_max = 0.0;

  // solver
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double tolerance = 1e-10;
  int max_newton = 60;
  int cells_t = 64;
  int cells_s = 0;
  std::optional<double> lambda;

  // experiment
  std::string experiment = "thm12";
  int n = 0;
  std::uint64_t seed = 7;
  std::vector<double> T_list{2.0, 4.0, 8.0};
  double T = 1.0;
  bool refine = false;
  int workers = 0;

  // inputs of the single-object commands: "guillemin", "bubble:<c>" or "random:<k>"
  std::string potential = "guillemin";
  std::string u0 = "guillemin";
  std::string u1 = "bubble:0.05";
  std::vector<double> direction;  // affine field a; empty means the first coordinate
  double t_max = 4.0;
  int samples = 11;

  std::string out = "mabuchi_out";

  /// Sorted "key = value" lines of every field that affects results.
  std::string canonical() const;
  std::string hash() const;
  MomentPolytope resolve_polytope() const;
  ExperimentConfig experiment_config() const;
};

/// Raw values keyed by option name (without dashes); the command is separate.
RunConfig build_run_config(const std::string& command, const std::map<std::string, std::string>& values);

/// Parses "1 0 0 | 0 1 0 | -1 -1 -2": per facet the integer normal then the
/// offset (integer, decimal or p/q). Facets are separated by '|' or ';'.
std::vector<Facet> parse_facets(const std::string& text);

}  // namespace mabuchi
