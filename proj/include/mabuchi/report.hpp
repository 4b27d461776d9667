#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mabuchi {

struct ExperimentReport;

/// Shortest decimal that round-trips to the same double.
std::string format_number(double x);

std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

/// report.json body. Wall-clock and the timestamp live only here.
std::string report_json(const ExperimentReport& r, const std::string& config_hash, const std::string& config_text);
/// samples.csv: a comment line with the config hash, then index, descriptor and the columns.
std::string samples_csv(const ExperimentReport& r, const std::string& config_hash);
std::string checks_csv(const ExperimentReport& r, const std::string& config_hash);
std::string plot_csv(const std::vector<std::pair<double, double>>& series, const std::string& config_hash);

/// Writes report.json, samples.csv, checks.csv and plotdata/<name>.csv under dir.
std::vector<std::filesystem::path> write_report(const ExperimentReport& r, const std::filesystem::path& dir,
                                                const std::string& config_hash, const std::string& config_text);

void write_text(const std::filesystem::path& path, const std::string& body);

}  // namespace mabuchi
