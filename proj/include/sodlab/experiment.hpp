// Config-driven experiment runner behind the command-line tool.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sodlab/serialize.hpp"

namespace sodlab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

struct ExperimentConfig {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> values;
  std::string output_path;

  /// Parses `key=value` lines; `#` starts a comment, the value is the rest of the line.
  static ExperimentConfig parse(const std::string& text);
  /// Applies one `key=value` override (the keys `command` and `seed` are special).
  void set(const std::string& assignment);

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback, int lo, int hi) const;
  std::uint64_t require_seed() const;

  Json to_json() const;
};

struct RunReport {
  ExperimentConfig config;
  Json payload;
  /// Scalar results used by sweeps.
  std::map<std::string, double> summary;
  std::optional<bool> verdict;
  /// Optional CSV series (Grinblyum table, Daugavet defects).
  std::string csv;
  double wall_time = 0.0;

  Json to_json() const;
};

const std::vector<std::string>& known_commands();
bool command_needs_seed(const ExperimentConfig& config);

/// Throws std::invalid_argument for unknown commands and violated preconditions.
RunReport run(const ExperimentConfig& config);

struct SweepResult {
  std::vector<RunReport> reports;
  std::string csv;
};

SweepResult sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values);

}  // namespace sodlab
