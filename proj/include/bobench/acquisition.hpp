#pragma once

#include <Eigen/Dense>
#include <functional>

#include "bobench/gpr.hpp"
#include "bobench/objectives.hpp"
#include "bobench/rng.hpp"
#include "bobench/sampling.hpp"

namespace bobench {

enum class AcquisitionKind { Ei, Ucb };

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::Ucb;
  double xi = 0.0;    // EI exploration
  double beta = 1.0;  // UCB exploration (linear, not sqrt)
};

/// Sampled point maximizing the current posterior mean; its mean is the
/// dataset utility u(D). Ties break toward the lowest index.
struct Incumbent {
  Eigen::VectorXd x_star;  // normalized
  double mu_star;          // posterior mean at x_star (normalized)
  int index;
};

Incumbent incumbent(const GprModel& model, const Eigen::MatrixXd& x_sampled);

/// Closed-form expected improvement for a Gaussian predictive (mu, sigma)
/// against incumbent utility u with exploration offset xi. Degenerate
/// sigma < 1e-12 falls back to max(mu - u - xi, 0).
double ei(double mu, double sigma, double u, double xi);
double ei(const Eigen::VectorXd& x, const GprModel& model, double u, double xi);

/// mu(x) + beta * sigma(x).
double ucb(const Eigen::VectorXd& x, const GprModel& model, double beta);

double standard_normal_cdf(double z);
double standard_normal_pdf(double z);

struct MaximizeConfig {
  int n_candidates = 4096;
  int refine_top = 10;
  int refine_evals = 200;
};

using Penalizer = std::function<double(const Eigen::VectorXd&)>;

/// Acquisition argmax: scores a random candidate pool, locally refines the
/// best few by coordinate pattern search, returns the best point clipped to
/// the domain. With a penalizer the acquisition is first shifted by its
/// minimum over the pool so the multiplicative penalty cannot flip signs.
/// Deterministic given the stream (stable argmax by evaluation order).
Eigen::VectorXd maximize(const GprModel& model, const AcquisitionSpec& spec,
                         const Domain& domain, RngStream& rng,
                         const Penalizer* penalizer = nullptr,
                         const MaximizeConfig& config = {});

}  // namespace bobench
