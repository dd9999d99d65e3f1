#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bobench/batch.hpp"
#include "bobench/gpr.hpp"
#include "bobench/objectives.hpp"

namespace bobench {

struct RunConfig {
  Objective gt = Objective::Ackley;
  NoiseSpec noise{};
  AcquisitionSpec acquisition{};
  BatchPolicy policy{};
  int n_init = 24;
  int n_iter = 50;
  std::uint64_t seed = 1;
  FitConfig fit{};
  MaximizeConfig maximize{};
};

/// One row of the learning curve, all reporting fields in original units
/// except the normalized regrets.
struct IterationRecord {
  int iter = 0;
  Eigen::MatrixXd batch_x;      // q x d, input units
  Eigen::VectorXd batch_y;      // noisy observations
  Eigen::VectorXd incumbent_x;  // input units
  double mu_star = 0.0;         // posterior mean at the incumbent, de-normalized
  double max_y = 0.0;           // best observation so far
  double ir_x = 0.0;            // normalized ||X* - X_max||
  double ir_y = 0.0;            // normalized |mu_D(X*) - y_max|
  Eigen::VectorXd lengthscales;
  double amplitude_sq = 0.0;
  double gnv = 0.0;
};

struct RunHistory {
  RunConfig config;
  double sigma = 0.0;  // noise std deviation actually applied (objective units)
  Dataset data;
  /// State right after the initial fit on the LHS design (iter = 0, no batch).
  IterationRecord init_record;
  std::vector<IterationRecord> records;
  GprModel final_model;  // trained on every observation
};

/// Executes one benchmark run: LHS initialization, then per iteration a
/// batch pick with the current model, evaluation with noise, a refit on all
/// accumulated data, and an incumbent record under the refreshed model.
/// Deterministic given the config (all randomness flows through named
/// streams derived from config.seed).
RunHistory run_bo(const RunConfig& config);

struct TracePoint {
  int iter;
  double dist_x;   // ||X* - X_max|| in input units
  double mu_star;  // de-normalized
  double max_y;
};

std::vector<TracePoint> incumbent_trace(const RunHistory& history);

}  // namespace bobench
