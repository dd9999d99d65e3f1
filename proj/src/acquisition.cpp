#include "bobench/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bobench {

namespace {
constexpr double kSigmaFloor = 1e-12;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

double standard_normal_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

Incumbent incumbent(const GprModel& model, const Eigen::MatrixXd& x_sampled) {
  if (x_sampled.rows() == 0)
    throw std::invalid_argument("incumbent requires a non-empty dataset");
  Eigen::VectorXd mean, var;
  model.posterior_many(x_sampled, mean, var);
  int best = 0;
  for (int i = 1; i < mean.size(); ++i)
    if (mean[i] > mean[best]) best = i;
  return {x_sampled.row(best).transpose(), mean[best], best};
}

double ei(double mu, double sigma, double u, double xi) {
  if (xi < 0.0) throw std::invalid_argument("ei requires xi >= 0");
  const double improve = mu - u - xi;
  if (sigma < kSigmaFloor) return std::max(improve, 0.0);
  const double z = improve / sigma;
  return improve * standard_normal_cdf(z) + sigma * standard_normal_pdf(z);
}

double ei(const Eigen::VectorXd& x, const GprModel& model, double u, double xi) {
  const auto [mu, var] = model.posterior(x);
  return ei(mu, std::sqrt(var), u, xi);
}

double ucb(const Eigen::VectorXd& x, const GprModel& model, double beta) {
  if (beta < 0.0) throw std::invalid_argument("ucb requires beta >= 0");
  const auto [mu, var] = model.posterior(x);
  return mu + beta * std::sqrt(var);
}

namespace {

double acquisition_from_moments(double mu, double sigma,
                                const AcquisitionSpec& spec, double u) {
  return spec.kind == AcquisitionKind::Ei ? ei(mu, sigma, u, spec.xi)
                                          : mu + spec.beta * sigma;
}

}  // namespace

Eigen::VectorXd maximize(const GprModel& model, const AcquisitionSpec& spec,
                         const Domain& domain, RngStream& rng,
                         const Penalizer* penalizer,
                         const MaximizeConfig& config) {
  // u(D) only matters for EI; the incumbent is over the training inputs.
  double u = 0.0;
  if (spec.kind == AcquisitionKind::Ei)
    u = model.size() > 0 ? incumbent(model, model.x_train()).mu_star
                         : model.mean_shift();

  const SampleBatch pool = candidates(config.n_candidates, domain, rng);
  Eigen::VectorXd mean, var;
  model.posterior_many(pool.points, mean, var);

  Eigen::VectorXd raw(mean.size());
  for (int i = 0; i < mean.size(); ++i)
    raw[i] = acquisition_from_moments(mean[i], std::sqrt(var[i]), spec, u);

  const double shift = penalizer ? raw.minCoeff() : 0.0;
  auto scored = [&](const Eigen::VectorXd& x, double raw_value) {
    if (!penalizer) return raw_value;
    return std::max(raw_value - shift, 0.0) * (*penalizer)(x);
  };
  auto score_point = [&](const Eigen::VectorXd& x) {
    const auto [mu, v] = model.posterior(x);
    return scored(x, acquisition_from_moments(mu, std::sqrt(v), spec, u));
  };

  Eigen::VectorXd score(raw.size());
  for (int i = 0; i < raw.size(); ++i)
    score[i] = scored(pool.points.row(i).transpose(), raw[i]);

  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  const int top = std::min<int>(config.refine_top, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](int a, int b) {
                      if (score[a] != score[b]) return score[a] > score[b];
                      return a < b;  // stable under ties
                    });

  Eigen::VectorXd best_x = pool.points.row(order[0]).transpose();
  double best_score = score[order[0]];

  // Coordinate pattern search from each retained candidate.
  const int d = domain.dim();
  for (int t = 0; t < top; ++t) {
    Eigen::VectorXd x = pool.points.row(order[t]).transpose();
    double fx = score[order[t]];
    Eigen::VectorXd step(d);
    for (int k = 0; k < d; ++k) step[k] = domain.width(k) / 8.0;
    int evals = 0;
    while (evals < config.refine_evals && step.maxCoeff() > 1e-10) {
      bool improved = false;
      for (int k = 0; k < d && evals < config.refine_evals; ++k) {
        for (double sgn : {+1.0, -1.0}) {
          Eigen::VectorXd cand = x;
          cand[k] = std::clamp(x[k] + sgn * step[k], domain.lower()[k],
                               domain.upper()[k]);
          if (cand[k] == x[k]) continue;
          const double fc = score_point(cand);
          ++evals;
          if (fc > fx) {
            fx = fc;
            x = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fx > best_score) {
      best_score = fx;
      best_x = x;
    }
  }
  return domain.clip(best_x);
}

}  // namespace bobench
