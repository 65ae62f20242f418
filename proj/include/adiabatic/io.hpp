#pragma once

// JSON exchange formats for matrices, distributions, schedules and torus
// specs, plus a CSV writer.

#include "adiabatic/markov.hpp"
#include "adiabatic/schedule.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace adiabatic::io {

using nlohmann::json;

/// { "dim": int, "rows": [[...], ...] }. Shape problems throw ConfigError;
/// kernel/generator invariants are checked by the typed readers.
Eigen::MatrixXd matrix_from_json(const json& j);
json matrix_to_json(const Eigen::MatrixXd& m);
StochasticMatrix kernel_from_json(const json& j);
Generator generator_from_json(const json& j);

/// { "weights": [...] }
Distribution distribution_from_json(const json& j);
json distribution_to_json(const Distribution& d);

/// { "kind": "linear" } | { "kind": "poly_flat", "m": int }
/// | { "kind": "glauber", "a": x, "beta1": x, "beta2": x }
/// | { "kind": "sampled", "knots": [[s, phi], ...] }
Schedule schedule_from_json(const json& j);
json schedule_to_json(const Schedule& phi);

struct TorusConfig {
  int n = 3;
  int d = 2;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double per_site_rate = 1.0;
};

/// { "n": int, "d": int, "beta1": x, "beta2": x, "per_site_rate": x }
TorusConfig torus_from_json(const json& j);
json torus_to_json(const TorusConfig& t);

/// Parses a JSON file; ConfigError when missing or malformed.
json load_json_file(const std::filesystem::path& path);

/// 17 significant digits.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Minimal reader for the files CsvWriter produces (quoted fields allowed).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace adiabatic::io
