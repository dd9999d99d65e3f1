#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bobench/objectives.hpp"
#include "bobench/rng.hpp"

namespace bobench {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ARD Matern-5/2 hyperparameters in normalized units.
struct KernelParams {
  double amplitude_sq = 1.0;
  Eigen::VectorXd lengthscales;  // one per input dimension, > 0
};

/// Full hyperparameter state of a model (kernel + Gaussian noise variance).
struct HyperParams {
  KernelParams kernel;
  double gnv = 1e-6;
};

struct FitConfig {
  int restarts = 5;    // 1 warm/default start + (restarts - 1) random
  int max_iters = 80;  // ascent iterations per restart
  double rel_tol = 1e-9;
  double ls_lo = 1e-3, ls_hi = 10.0;       // lengthscale bounds
  double amp_lo = 1e-6, amp_hi = 10.0;     // amplitude_sq bounds
  double gnv_floor = 1e-12, gnv_hi = 1.0;  // noise-variance bounds
  double gnv_init = 1e-6;
  std::optional<HyperParams> warm_start;
};

struct FitDiagnostics {
  std::vector<double> restart_initial_lml;
  std::vector<double> restart_final_lml;
  double best_lml = 0.0;
};

/// Maps the objective domain to the unit hypercube and the output range to
/// [0, 1]; round-trips are exact up to floating-point rounding.
class Normalizer {
 public:
  Normalizer(const Domain& domain, double y_low, double y_high);
  static Normalizer for_gt(const GroundTruth& gt);

  Eigen::VectorXd normalize_x(const Eigen::VectorXd& x) const;
  Eigen::VectorXd denormalize_x(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& x) const;
  double normalize_y(double y) const { return (y - y_low_) / (y_high_ - y_low_); }
  double denormalize_y(double u) const { return y_low_ + u * (y_high_ - y_low_); }
  double y_width() const { return y_high_ - y_low_; }

 private:
  Eigen::VectorXd x_lower_, x_width_;
  double y_low_, y_high_;
};

/// Accumulated observations in original units together with their
/// normalized images and the iteration that produced each row (0 = initial
/// design).
struct Dataset {
  Eigen::MatrixXd x_raw;   // n x d
  Eigen::VectorXd y_raw;   // noisy observations
  Eigen::MatrixXd x_norm;  // unit-cube image
  Eigen::VectorXd y_norm;
  std::vector<int> iteration;

  int size() const { return static_cast<int>(y_raw.size()); }
  void append(const Eigen::MatrixXd& x_rows, const Eigen::VectorXd& y_vals,
              int iter, const Normalizer& norm);
};

double kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
              const KernelParams& params);

/// Trained Gaussian-process surrogate over normalized coordinates. Immutable
/// after construction; the prior mean is the training-target average, frozen
/// at build time.
class GprModel {
 public:
  GprModel() = default;  // empty model; use build/prior/fit for real ones

  /// Factorizes K + gnv I (escalating jitter from 1e-12 to 1e-6 before
  /// throwing FitError).
  static GprModel build(Eigen::MatrixXd x_train, Eigen::VectorXd y_train,
                        KernelParams params, double gnv);
  /// Model with zero training points (prior only).
  static GprModel prior(KernelParams params, double gnv);

  int size() const { return static_cast<int>(y_train_.size()); }
  const Eigen::MatrixXd& x_train() const { return x_train_; }
  const Eigen::VectorXd& y_train() const { return y_train_; }
  const KernelParams& params() const { return params_; }
  double gnv() const { return gnv_; }
  double mean_shift() const { return mean_shift_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& chol() const { return chol_; }

  /// Predictive mean and latent variance (gnv excluded); variance clamped
  /// at zero.
  std::pair<double, double> posterior(const Eigen::VectorXd& x) const;
  double posterior_mean(const Eigen::VectorXd& x) const;
  /// Unclamped variance, for diagnostics.
  double posterior_raw_variance(const Eigen::VectorXd& x) const;
  /// Batched prediction over the rows of xs.
  void posterior_many(const Eigen::MatrixXd& xs, Eigen::VectorXd& mean,
                      Eigen::VectorXd& var) const;

  double log_marginal_likelihood() const;
  /// d LML / d {log amplitude_sq, log lengthscales..., log gnv}.
  Eigen::VectorXd lml_gradient() const;

  /// Same hyperparameters and prior mean, one extra observation; used for
  /// within-batch fantasy updates.
  GprModel with_fantasy(const Eigen::VectorXd& x, double y) const;

 private:
  void refactorize();
  Eigen::MatrixXd x_train_;
  Eigen::VectorXd y_train_;
  KernelParams params_;
  double gnv_ = 0.0;
  double mean_shift_ = 0.0;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;   // lower factor of K + (gnv + jitter) I
  Eigen::VectorXd alpha_;  // (K + gnv I)^{-1} (y - shift)
};

/// Maximizes the log marginal likelihood by multi-start projected gradient
/// ascent in log-hyperparameter space. The random stream drives the restart
/// initializations.
GprModel fit(const Eigen::MatrixXd& x_norm, const Eigen::VectorXd& y_norm,
             const FitConfig& config, RngStream& rng,
             FitDiagnostics* diag = nullptr);

}  // namespace bobench
