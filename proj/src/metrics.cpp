#include "bobench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bobench/acquisition.hpp"

namespace bobench {

namespace {

const IterationRecord& final_record(const RunHistory& history) {
  if (history.records.empty())
    throw std::invalid_argument("history has no iteration records");
  return history.records.back();
}

Eigen::VectorXd final_incumbent_norm(const RunHistory& history,
                                     const GroundTruth& gt) {
  return Normalizer::for_gt(gt).normalize_x(final_record(history).incumbent_x);
}

}  // namespace

double ir_x(const RunHistory& history, const GroundTruth& gt) {
  const Normalizer norm = Normalizer::for_gt(gt);
  return (final_incumbent_norm(history, gt) - norm.normalize_x(gt.x_max)).norm();
}

double ir_y(const RunHistory& history, const GroundTruth& gt) {
  return std::abs(final_record(history).mu_star - gt.y_max) / gt.y_range_width();
}

double cr_x(const RunHistory& history, const GroundTruth& gt) {
  (void)gt;
  double sum = 0.0;
  for (const auto& rec : history.records) sum += rec.ir_x;
  return sum;
}

double cr_y(const RunHistory& history, const GroundTruth& gt) {
  (void)gt;
  double sum = 0.0;
  for (const auto& rec : history.records) sum += rec.ir_y;
  return sum;
}

std::map<int, int> percentile_seeds(const std::vector<double>& per_seed_ir_x) {
  const int n = static_cast<int>(per_seed_ir_x.size());
  if (n < 3) throw std::invalid_argument("percentile ranking needs >= 3 seeds");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (per_seed_ir_x[a] != per_seed_ir_x[b])
      return per_seed_ir_x[a] > per_seed_ir_x[b];  // worst first
    return a < b;
  });
  std::map<int, int> out;
  for (int p : {25, 50, 75}) {
    const int pos = static_cast<int>(std::lround(p * (n + 1) / 100.0));
    out[p] = order[std::clamp(pos, 1, n) - 1];
  }
  return out;
}

std::pair<double, double> parity_rmse(const GprModel& model, const Dataset& data,
                                      const GroundTruth& gt) {
  if (data.size() == 0) throw std::invalid_argument("parity_rmse on empty dataset");
  const Normalizer norm = Normalizer::for_gt(gt);
  Eigen::VectorXd mean, var;
  model.posterior_many(data.x_norm, mean, var);
  double sq = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const double pred_raw = norm.denormalize_y(mean[i]);
    const double truth = gt.value(data.x_raw.row(i).transpose());
    sq += (pred_raw - truth) * (pred_raw - truth);
  }
  const double raw = std::sqrt(sq / data.size());
  return {raw, raw / gt.y_range_width()};
}

double basin_fraction(const std::vector<RunHistory>& histories,
                      const GroundTruth& gt) {
  if (!gt.x_max2)
    throw std::invalid_argument(
        "basin_fraction needs an objective with a second maximum");
  if (histories.empty())
    throw std::invalid_argument("basin_fraction on empty run set");
  const Normalizer norm = Normalizer::for_gt(gt);
  const Eigen::VectorXd m1 = norm.normalize_x(gt.x_max);
  const Eigen::VectorXd m2 = norm.normalize_x(*gt.x_max2);
  int near_global = 0;
  for (const auto& h : histories) {
    const Eigen::VectorXd x = final_incumbent_norm(h, gt);
    if ((x - m1).norm() < (x - m2).norm()) ++near_global;
  }
  return static_cast<double>(near_global) / static_cast<double>(histories.size());
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("mann_whitney_u requires non-empty samples");
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());

  // Midranks over the pooled sample.
  std::vector<std::pair<double, int>> pooled;  // (value, 0=a 1=b)
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });

  const std::size_t n = pooled.size();
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second == 0) rank_sum_a += midrank;
    tie_term += t * t * t - t;
    i = j;
  }

  const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double nn = n1 + n2;
  const double var =
      n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  double p = 1.0;
  if (var > 0.0) {
    const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);  // continuity
    p = z > 0.0 ? 2.0 * (1.0 - standard_normal_cdf(z)) : 1.0;
    p = std::clamp(p, 0.0, 1.0);
  }
  return {u, p};
}

BenchmarkSummary summarize_runs(const std::vector<RunHistory>& histories,
                                const GroundTruth& gt) {
  if (histories.empty())
    throw std::invalid_argument("summarize_runs on empty run set");
  BenchmarkSummary s;
  const int n = static_cast<int>(histories.size());
  for (const auto& h : histories) {
    s.per_seed_ir_x.push_back(ir_x(h, gt));
    s.mean_ir_x += ir_x(h, gt);
    s.mean_ir_y += ir_y(h, gt);
    s.mean_cr_x += cr_x(h, gt);
    s.mean_cr_y += cr_y(h, gt);
    const auto [rmse_raw, rmse_norm] = parity_rmse(h.final_model, h.data, gt);
    s.mean_rmse_raw += rmse_raw;
    s.mean_rmse_norm += rmse_norm;
    s.mean_sqrt_gnv += std::sqrt(h.final_model.gnv());
  }
  s.mean_ir_x /= n;
  s.mean_ir_y /= n;
  s.mean_cr_x /= n;
  s.mean_cr_y /= n;
  s.mean_rmse_raw /= n;
  s.mean_rmse_norm /= n;
  s.mean_sqrt_gnv /= n;
  if (n >= 3) s.percentile_index = percentile_seeds(s.per_seed_ir_x);
  if (gt.x_max2) s.basin = basin_fraction(histories, gt);
  return s;
}

}  // namespace bobench
