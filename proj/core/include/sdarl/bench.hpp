#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sdarl/experiment.hpp"

namespace sdarl {

struct BenchCell {
  std::string label;
  ExperimentSpec spec;
};

struct BenchPlan {
  std::string name;
  std::vector<BenchCell> cells;
  int workers = 0;            // 0 = hardware concurrency
  bool include_timing = true; // false writes time_s = 0 (byte-stable reruns)
};

std::vector<std::string> preset_names();

// Throws std::invalid_argument for an unknown name (the message lists the
// known presets).
BenchPlan make_preset(const std::string& name);

// Runs every cell; replication seeds derive from (base_seed, rep), rows come
// back in deterministic (cell, rep, method) order regardless of the worker
// count. Per-replication failures are recorded as rows with NaN metrics and
// collected into `errors`.
struct BenchRun {
  std::vector<ResultRow> rows;
  std::vector<std::string> errors;
};

BenchRun run_bench(const BenchPlan& plan, std::ostream* progress = nullptr);

// Aggregates grouped by (method, n, p, K, T, rho, R) in first-appearance
// order; failed rows are counted but excluded from the means.
struct SummaryRow {
  std::string method;
  Index n = 0, p = 0, k = 0, t = 0;
  double rho = 0.0, r = 1.0;
  int replications = 0;
  int failures = 0;
  double are_mean = 0.0, are_sd = 0.0;
  double pdr_mean = 0.0, fdr_mean = 0.0, cdr_mean = 0.0;
  double car_mean = 0.0;  // NaN when no row carries a CAR
  double iters_mean = 0.0;
  double time_mean = 0.0;
};

std::vector<SummaryRow> summarize(std::span<const ResultRow> rows);

void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows);

// Fixed-width text table of the summary (mean (sd) style for the error).
std::string format_summary(std::span<const SummaryRow> rows);

// Writes the per-replication CSV, re-reads it, and confirms the summary
// recomputed from the file matches the in-memory one exactly; throws
// std::logic_error on any mismatch. Returns the summary.
std::vector<SummaryRow> emit_results(const std::string& csv_path,
                                     std::span<const ResultRow> rows);

}  // namespace sdarl
