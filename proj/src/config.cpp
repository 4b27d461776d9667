#include "mabuchi/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mabuchi/report.hpp"

namespace mabuchi {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? sep : "") + items[i];
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> tokens(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_number<double>(s);
  const auto p = parse_number<long long>(s.substr(0, slash));
  const auto q = parse_number<long long>(s.substr(slash + 1));
  if (!p || !q || *q == 0) return std::nullopt;
  return static_cast<double>(*p) / static_cast<double>(*q);
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

bool valid_potential_spec(const std::string& s) {
  if (s == "guillemin") return true;
  if (s.rfind("bubble:", 0) == 0) return parse_number<double>(s.substr(7)).has_value();
  if (s.rfind("random:", 0) == 0) {
    const auto k = parse_number<int>(s.substr(7));
    return k && *k >= 0;
  }
  return false;
}

// Reads fields one by one and records every problem instead of stopping.
class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& values) : values_(values) {}

  const std::string* raw(const std::string& key) {
    used_.push_back(key);
    const auto it = values_.find(key);
    if (it == values_.end() || trim(it->second).empty()) return nullptr;
    return &it->second;
  }

  template <typename T>
  void number(const std::string& key, T& field) {
    if (const auto* s = raw(key)) {
      if (auto v = parse_number<T>(*s))
        field = *v;
      else
        fail(key, "'" + *s + "' is not a valid number");
    }
  }

  void list(const std::string& key, std::vector<double>& field) {
    if (const auto* s = raw(key)) {
      std::vector<double> out;
      for (const auto& t : tokens(*s, ", \t")) {
        if (auto v = parse_number<double>(t)) {
          out.push_back(*v);
        } else {
          fail(key, "'" + t + "' is not a valid number");
          return;
        }
      }
      field = out;
    }
  }

  void text(const std::string& key, std::string& field) {
    if (const auto* s = raw(key)) field = trim(*s);
  }

  void flag(const std::string& key, bool& field) {
    if (const auto* s = raw(key)) {
      const std::string v = trim(*s);
      if (v == "true" || v == "1" || v == "on" || v == "yes")
        field = true;
      else if (v == "false" || v == "0" || v == "off" || v == "no")
        field = false;
      else
        fail(key, "'" + v + "' is not a boolean");
    }
  }

  void fail(const std::string& key, const std::string& why) { problems.push_back(key + ": " + why); }

  void unknown_keys() {
    for (const auto& [k, v] : values_)
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) problems.push_back(k + ": unknown key");
  }

  std::vector<std::string> problems;

 private:
  const std::map<std::string, std::string>& values_;
  std::vector<std::string> used_;
};

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(ErrorKind::Config, join(problems, "; ")), problems_(std::move(problems)) {}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"functionals", "geodesic", "ray",    "solve-hcma",
                                              "futaki",      "battery",  "monitors"};
  return names;
}

std::vector<Facet> parse_facets(const std::string& text) {
  std::vector<Facet> facets;
  for (const auto& group : tokens(text, "|;")) {
    const auto parts = tokens(group, " \t,");
    if (parts.size() < 2 || parts.size() > 3)
      throw Error(ErrorKind::InvalidArgument, "facet '" + trim(group) + "' needs 1 or 2 normal entries and an offset");
    Facet f;
    f.normal.resize(static_cast<int>(parts.size()) - 1);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      const auto v = parse_number<int>(parts[i]);
      if (!v) throw Error(ErrorKind::InvalidArgument, "facet normal entry '" + parts[i] + "' is not an integer");
      f.normal(static_cast<int>(i)) = *v;
    }
    const auto offset = parse_rational(parts.back());
    if (!offset) throw Error(ErrorKind::InvalidArgument, "facet offset '" + parts.back() + "' is not a number");
    f.offset = *offset;
    facets.push_back(f);
  }
  if (facets.empty()) throw Error(ErrorKind::InvalidArgument, "empty facet list");
  return facets;
}

RunConfig build_run_config(const std::string& command, const std::map<std::string, std::string>& values) {
  RunConfig c;
  Reader r(values);
  c.command = command;
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    r.problems.push_back("command: '" + command + "' is not one of " + join(command_names(), ", "));

  r.text("polytope", c.polytope);
  if (const auto* s = r.raw("facets")) {
    try {
      c.facets = parse_facets(*s);
    } catch (const Error& e) {
      r.fail("facets", e.what());
    }
  }
  r.number("h", c.h);
  r.number("order", c.order);
  r.number("s_max", c.s_max);
  r.list("eps", c.eps);
  r.number("tolerance", c.tolerance);
  r.number("max_newton", c.max_newton);
  r.number("cells_t", c.cells_t);
  r.number("cells_s", c.cells_s);
  double lambda = NAN;
  r.number("lambda", lambda);
  if (!std::isnan(lambda)) c.lambda = lambda;
  r.text("experiment", c.experiment);
  r.number("n", c.n);
  r.number("seed", c.seed);
  r.list("T_list", c.T_list);
  r.number("T", c.T);
  r.flag("refine", c.refine);
  r.number("workers", c.workers);
  r.text("potential", c.potential);
  r.text("u0", c.u0);
  r.text("u1", c.u1);
  r.list("direction", c.direction);
  r.number("t_max", c.t_max);
  r.number("samples", c.samples);
  r.text("out", c.out);
  r.unknown_keys();

  int dim = 0;
  if (c.facets.empty()) {
    if (c.polytope != "P1" && c.polytope != "P2" && c.polytope != "PF1")
      r.fail("polytope", "'" + c.polytope + "' is not P1, P2 or PF1 (give facets for a custom polytope)");
    else
      dim = c.polytope == "P1" ? 1 : 2;
  }
  if (!c.facets.empty() || dim > 0) {
    try {
      dim = c.resolve_polytope().dimension();
    } catch (const Error& e) {
      r.fail("facets", e.what());
    }
  }
  if (!(c.h >= 0.0 && c.h < 0.5)) r.fail("h", "must be in [0, 0.5) (0 selects the default)");
  if (c.order < 0 || c.order > 8) r.fail("order", "must be in [0, 8] (0 selects the default)");
  if (!(c.s_max >= 0.0)) r.fail("s_max", "must be >= 0 (0 selects the default)");
  if (c.eps.empty()) r.fail("eps", "needs at least one value");
  for (double e : c.eps)
    if (!(e > 0.0 && e <= 1.0)) r.fail("eps", "every value must be in (0, 1], got " + format_number(e));
  if (!strictly_decreasing(c.eps)) r.fail("eps", "values must be strictly decreasing");
  if (!(c.tolerance > 0.0)) r.fail("tolerance", "must be > 0");
  if (c.max_newton < 1) r.fail("max_newton", "must be >= 1");
  if (c.cells_t < 4) r.fail("cells_t", "must be >= 4");
  if (c.cells_s != 0 && c.cells_s < 4) r.fail("cells_s", "must be 0 or >= 4");
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end())
    r.fail("experiment", "'" + c.experiment + "' is not one of " + join(ids, ", "));
  if (c.n < 0) r.fail("n", "must be >= 0 (0 selects the battery default)");
  if (c.T_list.empty()) r.fail("T_list", "needs at least one value");
  for (double t : c.T_list)
    if (!(t > 0.0)) r.fail("T_list", "every value must be > 0, got " + format_number(t));
  if (!strictly_increasing(c.T_list)) r.fail("T_list", "values must be strictly increasing");
  if (!(c.T > 0.0)) r.fail("T", "must be > 0");
  if (c.workers < 0) r.fail("workers", "must be >= 0 (0 selects the processor count)");
  for (const auto& [key, spec] : {std::pair<std::string, std::string>{"potential", c.potential},
                                  {"u0", c.u0},
                                  {"u1", c.u1}})
    if (!valid_potential_spec(spec))
      r.fail(key, "'" + spec + "' is not guillemin, bubble:<c> or random:<k>");
  if (!c.direction.empty()) {
    if (dim > 0 && static_cast<int>(c.direction.size()) != dim)
      r.fail("direction", "needs " + std::to_string(dim) + " entries");
    if (std::all_of(c.direction.begin(), c.direction.end(), [](double a) { return a == 0.0; }))
      r.fail("direction", "must be nonzero");
  }
  if (!(c.t_max > 0.0)) r.fail("t_max", "must be > 0");
  if (c.samples < 3) r.fail("samples", "must be >= 3");
  if (c.out.empty()) r.fail("out", "must not be empty");

  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["command"] = command;
  kv["polytope"] = polytope;
  std::string f;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (i) f += " | ";
    for (int k = 0; k < facets[i].normal.size(); ++k) f += std::to_string(facets[i].normal(k)) + " ";
    f += format_number(facets[i].offset);
  }
  kv["facets"] = f;
  kv["h"] = format_number(h);
  kv["order"] = std::to_string(order);
  kv["s_max"] = format_number(s_max);
  kv["eps"] = list_text(eps);
  kv["tolerance"] = format_number(tolerance);
  kv["max_newton"] = std::to_string(max_newton);
  kv["cells_t"] = std::to_string(cells_t);
  kv["cells_s"] = std::to_string(cells_s);
  kv["lambda"] = lambda ? format_number(*lambda) : "prescription";
  kv["experiment"] = experiment;
  kv["n"] = std::to_string(n);
  kv["seed"] = std::to_string(seed);
  kv["T_list"] = list_text(T_list);
  kv["T"] = format_number(T);
  kv["refine"] = refine ? "true" : "false";
  kv["potential"] = potential;
  kv["u0"] = u0;
  kv["u1"] = u1;
  kv["direction"] = list_text(direction);
  kv["t_max"] = format_number(t_max);
  kv["samples"] = std::to_string(samples);
  std::string s;
  for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
  return s;
}

std::string RunConfig::hash() const { return hash_hex(fnv1a(canonical())); }

MomentPolytope RunConfig::resolve_polytope() const {
  return facets.empty() ? make_polytope(polytope) : make_polytope(polytope, facets);
}

ExperimentConfig RunConfig::experiment_config() const {
  ExperimentConfig e;
  e.polytope = polytope;
  e.facets = facets;
  e.h = h;
  e.order = order;
  e.n = n;
  e.seed = seed;
  e.workers = workers;
  e.T_list = T_list;
  e.T = T;
  e.eps = eps;
  e.strip.cells_t = cells_t;
  e.strip.cells_s = cells_s;
  e.strip.s_max = s_max;
  e.strip.tolerance = tolerance;
  e.strip.max_newton = max_newton;
  e.strip.lambda = lambda;
  return e;
}

}  // namespace mabuchi
