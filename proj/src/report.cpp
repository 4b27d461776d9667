#include "mabuchi/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "mabuchi/errors.hpp"
#include "mabuchi/experiments.hpp"

namespace mabuchi {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// JSON has no infinities; they are written as strings.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string report_json(const ExperimentReport& r, const std::string& config_hash, const std::string& config_text) {
  using nlohmann::json;
  json j;
  j["experiment"] = r.id;
  j["polytope"] = r.polytope;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["acceptance_rate"] = number(r.acceptance_rate);
  j["grid"] = {{"h", number(r.h)}, {"order", r.order}, {"s_max", number(r.s_max)}};
  json eps = json::array();
  for (double e : r.eps_schedule) eps.push_back(number(e));
  j["grid"]["eps_schedule"] = eps;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json m = json::array();
    for (double x : c.margins) m.push_back(number(x));
    checks.push_back({{"name", c.name},
                      {"margin", number(c.margin())},
                      {"tolerance", number(c.tolerance)},
                      {"pass", c.pass()},
                      {"margins", m}});
  }
  j["checks"] = checks;
  j["pass"] = r.pass();
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = number(v);
  j["summary"] = summary;
  if (r.refinement) {
    j["refinement"] = {{"verdicts_match", r.refinement->verdicts_match},
                       {"worst_worsening", number(r.refinement->worst_worsening)},
                       {"worst_check", r.refinement->worst_check},
                       {"limit", number(r.refinement->limit)},
                       {"pass", r.refinement->pass()}};
    json per_check = json::object();
    for (const auto& [k, v] : r.refinement->worsening) per_check[k] = number(v);
    j["refinement"]["worsening"] = per_check;
  }
  j["files"] = {{"samples", "samples.csv"}, {"checks", "checks.csv"}};
  for (const auto& [name, series] : r.plots) j["files"]["plotdata"].push_back("plotdata/" + name + ".csv");
  j["metadata"] = {{"config_hash", config_hash},
                   {"config", config_text},
                   {"wall_clock_seconds", number(r.seconds)},
                   {"generated_at", utc_now()}};
  return j.dump(2) + "\n";
}

std::string samples_csv(const ExperimentReport& r, const std::string& config_hash) {
  std::string s = "# config_hash=" + config_hash + "\nindex,descriptor";
  for (const auto& c : r.columns) s += "," + c;
  s += "\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    s += std::to_string(i) + "," + (i < r.descriptors.size() ? r.descriptors[i] : std::string());
    for (double x : r.rows[i]) s += "," + format_number(x);
    s += "\n";
  }
  return s;
}

std::string checks_csv(const ExperimentReport& r, const std::string& config_hash) {
  std::string s = "# config_hash=" + config_hash + "\ncheck,margin,tolerance,pass,samples\n";
  for (const auto& c : r.checks)
    s += c.name + "," + format_number(c.margin()) + "," + format_number(c.tolerance) + "," +
         (c.pass() ? "true" : "false") + "," + std::to_string(c.margins.size()) + "\n";
  return s;
}

std::string plot_csv(const std::vector<std::pair<double, double>>& series, const std::string& config_hash) {
  std::string s = "# config_hash=" + config_hash + "\nx,y\n";
  for (const auto& [x, y] : series) s += format_number(x) + "," + format_number(y) + "\n";
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << body;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& r, const std::filesystem::path& dir,
                                                const std::string& config_hash, const std::string& config_text) {
  namespace fs = std::filesystem;
  fs::remove_all(dir / "plotdata");  // no stale series from an earlier run
  fs::create_directories(dir / "plotdata");
  std::vector<fs::path> written{dir / "report.json", dir / "samples.csv", dir / "checks.csv"};
  write_text(written[0], report_json(r, config_hash, config_text));
  write_text(written[1], samples_csv(r, config_hash));
  write_text(written[2], checks_csv(r, config_hash));
  for (const auto& [name, series] : r.plots) {
    written.push_back(dir / "plotdata" / (name + ".csv"));
    write_text(written.back(), plot_csv(series, config_hash));
  }
  return written;
}

}  // namespace mabuchi
