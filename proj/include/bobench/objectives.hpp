#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "bobench/rng.hpp"

namespace bobench {

/// Axis-aligned box of input bounds. Dimension-generic; the shipped
/// benchmarks are 6D.
class Domain {
 public:
  Domain(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double width(int i) const { return upper_[i] - lower_[i]; }
  Eigen::VectorXd midpoint() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clip(Eigen::VectorXd x) const;

  static Domain unit_cube(int d);

 private:
  Eigen::VectorXd lower_, upper_;
};

enum class Objective { Ackley, Hartmann };

/// Analytic benchmark objective with its domain, known optima and output
/// range. Both shipped functions are maximization problems.
struct GroundTruth {
  Objective id;
  Domain domain;
  Eigen::VectorXd x_max;
  double y_max;
  std::optional<Eigen::VectorXd> x_max2;
  std::optional<double> y_max2;
  double y_low;   // output range lower edge
  double y_high;  // output range upper edge

  double value(const Eigen::VectorXd& x) const;
  double y_range_width() const { return y_high - y_low; }

  static const GroundTruth& ackley();
  static const GroundTruth& hartmann();
  static const GroundTruth& get(Objective id);
};

/// Sign-flipped 6D Ackley: one sharp global maximum A(0) = 0, values in
/// [-22.3, 0] over the hypercube [-32.768, 32.768]^6.
double eval_ackley(const Eigen::VectorXd& x);

/// Sign-flipped 6D Hartmann: global maximum 3.32237 plus a second local
/// maximum close in value, over the unit hypercube.
double eval_hartmann(const Eigen::VectorXd& x);

enum class NoiseMode { None, GtMax, KernelAmplitude };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::None;
  double level = 0.0;  // proportion in [0, 1]
  // Normalized signal amplitude used by KernelAmplitude mode; converted
  // to objective units against the ground truth's output range.
  double reference_amplitude = 0.0;
};

/// Noise standard deviation in objective units for a spec/objective pair.
double noise_sigma(const NoiseSpec& spec, const GroundTruth& gt);

/// Default normalized reference amplitudes obtained from noiseless
/// calibration runs (overridable, see the bench module).
double default_reference_amplitude(Objective id);

/// y + eps with eps ~ N(0, sigma^2); sigma = 0 returns y exactly.
double add_noise(double y_true, double sigma, RngStream& rng);

/// Max-projection of the objective onto an input-dimension pair: cell (i, j)
/// holds the maximum over the remaining dimensions, located by random search
/// (n_samples draws) refined from the best five hits. Cells are evaluated at
/// their centers; row-major resolution x resolution.
Eigen::MatrixXd gt_projection_grid(const GroundTruth& gt, int dim_a, int dim_b,
                                   int resolution, RngStream& rng,
                                   int n_samples = 2000);

}  // namespace bobench
