#include "bobench/batch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bobench/sampling.hpp"

namespace bobench {

double lp_penalizer(const Eigen::VectorXd& x, const Eigen::VectorXd& x_picked,
                    double mu_picked, double sigma_picked, double lipschitz,
                    double best_mean) {
  if (lipschitz <= 0.0) throw std::invalid_argument("lp_penalizer requires L > 0");
  const double sigma = std::max(sigma_picked, 1e-12);
  const double z = (lipschitz * (x - x_picked).norm() - best_mean + mu_picked) /
                   (std::sqrt(2.0) * sigma);
  return standard_normal_cdf(z);
}

double lp_penalizer(const Eigen::VectorXd& x, const Eigen::VectorXd& x_picked,
                    const GprModel& model, double lipschitz, double best_mean) {
  const auto [mu, var] = model.posterior(x_picked);
  return lp_penalizer(x, x_picked, mu, std::sqrt(var), lipschitz, best_mean);
}

double estimate_lipschitz(const GprModel& model, const Domain& domain,
                          RngStream& rng, int n_candidates, double fd_step) {
  const int d = domain.dim();
  const SampleBatch pool = candidates(n_candidates, domain, rng);
  double best = 0.0;
  for (int i = 0; i < n_candidates; ++i) {
    double norm_sq = 0.0;
    for (int k = 0; k < d; ++k) {
      Eigen::VectorXd hi = pool.points.row(i).transpose();
      Eigen::VectorXd lo = hi;
      hi[k] = std::min(hi[k] + fd_step, domain.upper()[k]);
      lo[k] = std::max(lo[k] - fd_step, domain.lower()[k]);
      const double spread = hi[k] - lo[k];
      if (spread <= 0.0) continue;
      const double g =
          (model.posterior_mean(hi) - model.posterior_mean(lo)) / spread;
      norm_sq += g * g;
    }
    best = std::max(best, std::sqrt(norm_sq));
  }
  return std::max(best, 1e-6);
}

namespace {

double constant_lie(const GprModel& model, ClLie lie) {
  const Eigen::VectorXd& y = model.y_train();
  switch (lie) {
    case ClLie::MinObserved:
      return y.minCoeff();
    case ClLie::MaxObserved:
      return y.maxCoeff();
    case ClLie::MeanObserved:
      return y.mean();
  }
  throw std::invalid_argument("unknown constant-liar value");
}

}  // namespace

Eigen::MatrixXd pick_batch(const GprModel& model, const AcquisitionSpec& spec,
                           const BatchPolicy& policy, const Domain& domain,
                           RngStream& rng, const MaximizeConfig& config) {
  if (policy.q < 1) throw std::invalid_argument("batch size must be >= 1");
  const int d = domain.dim();
  Eigen::MatrixXd picks(policy.q, d);

  // First pick is the unpenalized argmax, before any policy-specific draws,
  // so q = 1 matches a plain maximize call on the same stream.
  picks.row(0) = maximize(model, spec, domain, rng, nullptr, config).transpose();
  if (policy.q == 1) return picks;

  if (policy.method == BatchMethod::Lp) {
    const double lipschitz = estimate_lipschitz(model, domain, rng);
    const double best_mean =
        model.size() > 0 ? incumbent(model, model.x_train()).mu_star
                         : model.mean_shift();
    // Cache the picked points' posteriors; they do not change within a batch.
    std::vector<Eigen::VectorXd> picked;
    std::vector<double> mu_p, sigma_p;
    auto note_pick = [&](const Eigen::VectorXd& x) {
      const auto [mu, var] = model.posterior(x);
      picked.push_back(x);
      mu_p.push_back(mu);
      sigma_p.push_back(std::sqrt(var));
    };
    note_pick(picks.row(0).transpose());
    for (int j = 1; j < policy.q; ++j) {
      Penalizer pen = [&](const Eigen::VectorXd& x) {
        double p = 1.0;
        for (std::size_t k = 0; k < picked.size(); ++k)
          p *= lp_penalizer(x, picked[k], mu_p[k], sigma_p[k], lipschitz,
                            best_mean);
        return p;
      };
      picks.row(j) = maximize(model, spec, domain, rng, &pen, config).transpose();
      note_pick(picks.row(j).transpose());
    }
    return picks;
  }

  // KB / CL: fantasy refits with frozen hyperparameters and prior mean.
  GprModel believer = model;
  for (int j = 1; j < policy.q; ++j) {
    const Eigen::VectorXd prev = picks.row(j - 1).transpose();
    const double fantasy = policy.method == BatchMethod::Kb
                               ? believer.posterior_mean(prev)
                               : constant_lie(model, policy.cl_lie);
    believer = believer.with_fantasy(prev, fantasy);
    picks.row(j) = maximize(believer, spec, domain, rng, nullptr, config).transpose();
  }
  return picks;
}

}  // namespace bobench
