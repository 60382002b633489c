#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radmaxlab/core.hpp"

namespace radmaxlab::harness {

/// Raised for unreadable or malformed configuration; the CLI maps it to exit code 2.
struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

/// Everything an experiment needs; config + seed determine the report body.
struct ExperimentConfig {
  std::string experiment;
  std::string space = "hilbert:1";
  int n = 1;
  int J = 6;
  int N = 1;
  std::vector<double> p{2.0};
  double eps = 0.0;
  int ensemble = 8;
  std::string ensemble_kind = "random";
  std::uint64_t seed = 1;
  int m = 3;
  double lambda = 1.0;
  double Lambda = 10.0;
  int restarts = 8;
  int sweeps = 50;
  std::int64_t budget = 2048;
  int nodes_per_decade = 40;
  std::vector<int> J_list;  // extra resolutions for stability tables
  std::string out_dir = ".";
  std::string format = "json";

  /// Applies one key = value assignment; unknown keys throw ConfigError.
  void set(const std::string& key, const std::string& value);
  /// All fields as ordered key/value strings, in declaration order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Flat key = value text; '#' and ';' start comments, [section] lines are ignored.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::vector<double> parse_double_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

}  // namespace radmaxlab::harness
