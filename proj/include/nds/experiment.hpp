#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nds/dynamics.hpp"

namespace nds {

struct Truncation {
  int N_max = 32;
  int K_max = 4096;
  std::optional<int> L;  // Cantor word length for points given in checks
  std::vector<Rational> eps{Rational(1, 10)};
  int horizon = 32;
  std::size_t grid = 64;
};

/// One requested check. Fields not used by `op` stay empty.
struct CheckSpec {
  std::string op;
  std::vector<Rational> eps;  // explicit "eps", else the truncation's eps list
  std::optional<Point> x0;
  int map_index = 0;  // 0: the limit, n >= 1: f_n
  std::optional<int> horizon;
  Rational delta, probe_eps;
  int probe_grid = 32;
  RationalInterval seed;
  int max_rounds = 64;
  int max_period = 8;
  int n = 1;
  int j_max = 3;
  Rational p;
  int depth = 3;
  std::optional<std::string> expect;
};

struct ExperimentConfig {
  NDSystem system;
  Truncation truncation;
  std::vector<CheckSpec> checks;
  std::string format = "jsonl";  // jsonl | csv
  std::optional<std::string> path;
};

/// Validates the whole document before anything runs; ConfigError names the
/// first offending field. Top level: {system, checks, truncation, output}.
/// `system` is a system record or {"gallery": id, "params": {...}}.
ExperimentConfig parse_experiment_config(const Json& j);

struct CheckRecord {
  Json json;  // one JSON-lines record
  std::string op;
  std::string eps;
  std::string outcome;
  std::optional<std::string> expect;
  bool passed = true;
};

struct ExperimentResult {
  std::vector<CheckRecord> records;
  std::size_t failures() const;
};

/// Runs the checks in declaration order. A check fails when its outcome differs
/// from `expect` or it reports a theorem-check or instance-check failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

std::string records_jsonl(const ExperimentResult& r);
std::string records_csv(const ExperimentResult& r);
std::string summary_table(const ExperimentResult& r);

/// Flattens records (condition, transitivity or gallery JSON, one per line or a
/// single document) to CSV. kind: trace | coverage | pair-matrix. UsageError
/// when no record carries the requested series.
std::string plot_data_csv(const std::vector<Json>& records, const std::string& kind);

}  // namespace nds
