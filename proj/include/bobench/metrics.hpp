#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bobench/loop.hpp"

namespace bobench {

/// Final instantaneous regrets of one run, Euclidean in normalized input
/// coordinates and absolute in normalized output units.
double ir_x(const RunHistory& history, const GroundTruth& gt);
double ir_y(const RunHistory& history, const GroundTruth& gt);

/// Cumulative regrets: sums of the per-iteration instantaneous regrets.
double cr_x(const RunHistory& history, const GroundTruth& gt);
double cr_y(const RunHistory& history, const GroundTruth& gt);

/// Nearest-rank percentile positions over per-seed final IR(X) values sorted
/// worst-first: percentile p maps to 1-based position round(p (n+1) / 100),
/// clamped to [1, n]. Returns indices into the input vector; ties break by
/// index.
std::map<int, int> percentile_seeds(const std::vector<double>& per_seed_ir_x);

/// RMSE between posterior-mean predictions and noiseless ground-truth values
/// at every sampled point; returned as (raw, normalized).
std::pair<double, double> parity_rmse(const GprModel& model, const Dataset& data,
                                      const GroundTruth& gt);

/// Fraction of runs whose final incumbent lies nearer the global maximum
/// than the second maximum (normalized coordinates).
double basin_fraction(const std::vector<RunHistory>& histories,
                      const GroundTruth& gt);

struct MannWhitneyResult {
  double u;  // U statistic of the first sample
  double p;  // two-sided, normal approximation with tie correction
};

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

/// Cross-seed aggregates of a benchmark cell.
struct BenchmarkSummary {
  double mean_ir_x = 0.0, mean_cr_x = 0.0;
  double mean_ir_y = 0.0, mean_cr_y = 0.0;
  std::vector<double> per_seed_ir_x;
  std::map<int, int> percentile_index;  // {25, 50, 75} -> index into runs
  double mean_rmse_raw = 0.0, mean_rmse_norm = 0.0;
  double mean_sqrt_gnv = 0.0;
  std::optional<double> basin = std::nullopt;  // only when gt has x_max2
};

BenchmarkSummary summarize_runs(const std::vector<RunHistory>& histories,
                                const GroundTruth& gt);

}  // namespace bobench
