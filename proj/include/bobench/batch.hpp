#pragma once

#include <Eigen/Dense>

#include "bobench/acquisition.hpp"
#include "bobench/gpr.hpp"

namespace bobench {

enum class BatchMethod { Lp, Kb, Cl };
enum class ClLie { MinObserved, MaxObserved, MeanObserved };

struct BatchPolicy {
  BatchMethod method = BatchMethod::Lp;
  int q = 4;
  ClLie cl_lie = ClLie::MinObserved;
};

/// Gaussian-CDF soft penalizer of the local-penalization method:
/// Phi((L ||x - x_picked|| - best_mean + mu_picked) / (sqrt(2) sigma_picked)).
/// Near 0 close to the picked point, near 1 far away.
double lp_penalizer(const Eigen::VectorXd& x, const Eigen::VectorXd& x_picked,
                    double mu_picked, double sigma_picked, double lipschitz,
                    double best_mean);
double lp_penalizer(const Eigen::VectorXd& x, const Eigen::VectorXd& x_picked,
                    const GprModel& model, double lipschitz, double best_mean);

/// Lipschitz estimate for local penalization: largest finite-difference
/// gradient norm of the posterior mean over a random candidate set, floored
/// at 1e-6.
double estimate_lipschitz(const GprModel& model, const Domain& domain,
                          RngStream& rng, int n_candidates = 500,
                          double fd_step = 1e-4);

/// Serial batch selection. The first point is the plain acquisition argmax;
/// the remainder follow the policy: LP multiplies a shifted-nonnegative
/// acquisition by penalizers around earlier picks, KB refits with the
/// fantasy observation y = mu(pick), CL refits with a constant lie. Fantasy
/// refits never re-tune hyperparameters.
Eigen::MatrixXd pick_batch(const GprModel& model, const AcquisitionSpec& spec,
                           const BatchPolicy& policy, const Domain& domain,
                           RngStream& rng, const MaximizeConfig& config = {});

}  // namespace bobench
