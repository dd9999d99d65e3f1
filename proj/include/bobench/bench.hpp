#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bobench/loop.hpp"
#include "bobench/metrics.hpp"

namespace bobench {

inline constexpr const char* kToolName = "bobench";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal rendering that round-trips a double (up to 17
/// significant digits).
std::string fmt17(double v);
double parse_double(const std::string& s);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

// --- enum <-> flag spellings -----------------------------------------------

std::string to_string(Objective v);
std::string to_string(AcquisitionKind v);
std::string to_string(BatchMethod v);
std::string to_string(NoiseMode v);
Objective objective_from_string(const std::string& s);
AcquisitionKind acquisition_from_string(const std::string& s);
BatchMethod batch_from_string(const std::string& s);
NoiseMode noise_mode_from_string(const std::string& s);

/// Stable identifier of one sweep cell, derived from the distinguishing
/// config fields.
std::string cell_id(const RunConfig& cfg);

// --- sweep configuration ----------------------------------------------------

struct SweepAxes {
  std::vector<NoiseMode> noise_modes;
  std::vector<double> noise_levels;
  std::vector<AcquisitionKind> acq_kinds;
  std::vector<double> betas;
  std::vector<double> xis;
  std::vector<BatchMethod> batch_methods;
};

struct SweepConfig {
  RunConfig base;
  int n_seeds = 99;
  std::uint64_t seed_base = 0;
  SweepAxes axes;
  int parallelism = 1;
};

/// Cross product of the populated axes applied to the base config; an empty
/// axis keeps the base value. Cells come out in a stable enumeration order.
std::vector<RunConfig> expand_sweep(const SweepConfig& cfg);

/// Runs seeds seed_base + 1 .. seed_base + n_seeds, distributing whole runs
/// over worker threads. Output order is by seed regardless of parallelism.
std::vector<RunHistory> run_seeds(const RunConfig& base, int n_seeds,
                                  std::uint64_t seed_base, int parallelism);

// --- file formats -----------------------------------------------------------

inline constexpr const char* kCurveHeader =
    "iter,x1,x2,x3,x4,x5,x6,mu_star,max_y,ir_x,ir_y,ls1,ls2,ls3,ls4,ls5,ls6,"
    "amp_sq,gnv";
inline constexpr const char* kSamplesHeader = "iter,x1,x2,x3,x4,x5,x6,y";

void write_learning_curve_csv(const std::filesystem::path& path,
                              const RunHistory& history);
void write_samples_csv(const std::filesystem::path& path,
                       const RunHistory& history);

struct CurveRow {
  int iter = 0;
  Eigen::VectorXd incumbent_x;
  double mu_star = 0, max_y = 0, ir_x = 0, ir_y = 0;
  Eigen::VectorXd lengthscales;
  double amplitude_sq = 0, gnv = 0;
};
std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path);

struct SampleRows {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<int> iteration;
};
SampleRows read_samples_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string cell;
  int n_seeds = 0;
  std::uint64_t seed_base = 0;
  BenchmarkSummary summary;
  std::map<int, std::uint64_t> percentile_seed;  // percentile -> seed number
};
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);

// --- manifest ----------------------------------------------------------------

using Manifest = std::map<std::string, std::string>;

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Reconstructs a cell's run configuration from manifest entries; the exact
/// inverse of what bench_run records.
RunConfig run_config_from_manifest(const Manifest& m, const std::string& cell);

// --- orchestration ------------------------------------------------------------

struct BenchResult {
  std::vector<std::string> cells;
  std::vector<SummaryRow> rows;
  Manifest manifest;
};

/// Executes every cell of the sweep, writing per-seed learning curves and
/// sample logs under out/<cell>/, a summary.csv keyed by cell id, and a
/// manifest listing every output file with its content digest.
BenchResult bench_run(const SweepConfig& cfg, const std::filesystem::path& out);

/// Median converged kernel amplitude (sqrt of amplitude_sq, normalized) over
/// noiseless runs; the value NoiseSpec.reference_amplitude expects.
double calibrate_amplitude(Objective fn, int n_seeds, const RunConfig& proto,
                           std::uint64_t seed_base, int parallelism);

/// Ground-truth max-projection grid file: resolution^2 rows of
/// i,j,xa,xb,value plus empty overlay columns.
void emit_projection_gt(Objective fn, int dim_a, int dim_b, int resolution,
                        const std::filesystem::path& path,
                        std::uint64_t seed = 0, int n_samples = 2000);

/// Surrogate posterior-mean grid over an input pair with the remaining
/// dimensions held at the incumbent; sampled points fill the overlay
/// columns (pt_xa, pt_xb, pt_iter) of the leading rows.
void emit_projection_surrogate(const GprModel& model, const Dataset& data,
                               const GroundTruth& gt,
                               const Eigen::VectorXd& incumbent_raw, int dim_a,
                               int dim_b, int resolution,
                               const std::filesystem::path& path);

/// Rebuilds the recorded per-iteration models of a stored run from its
/// samples and hyperparameter log, and writes one surrogate grid per
/// requested iteration. Returns the emitted paths.
std::vector<std::filesystem::path> emit_frames(
    const std::filesystem::path& run_dir, const std::string& cell,
    std::uint64_t seed, int dim_a, int dim_b, int resolution,
    const std::vector<int>& iters);

/// Recomputes the summary rows of a stored run directory from its per-seed
/// files alone.
std::vector<SummaryRow> summarize_dir(const std::filesystem::path& run_dir);

}  // namespace bobench
