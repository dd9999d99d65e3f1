#include "bobench/loop.hpp"

#include <cmath>

#include "bobench/acquisition.hpp"
#include "bobench/sampling.hpp"

namespace bobench {

namespace {

Eigen::VectorXd evaluate_with_noise(const GroundTruth& gt,
                                    const Eigen::MatrixXd& x_rows, double sigma,
                                    RngStream& noise_rng) {
  Eigen::VectorXd y(x_rows.rows());
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i)
    y[i] = add_noise(gt.value(x_rows.row(i).transpose()), sigma, noise_rng);
  return y;
}

}  // namespace

RunHistory run_bo(const RunConfig& config) {
  if (config.n_init < 2) throw std::invalid_argument("n_init must be >= 2");
  if (config.n_iter < 0) throw std::invalid_argument("n_iter must be >= 0");

  const GroundTruth& gt = GroundTruth::get(config.gt);
  const Normalizer norm = Normalizer::for_gt(gt);
  const Domain unit = Domain::unit_cube(gt.domain.dim());
  const double sigma = noise_sigma(config.noise, gt);
  const Eigen::VectorXd x_max_norm = norm.normalize_x(gt.x_max);
  const double y_max_norm = norm.normalize_y(gt.y_max);

  RngStream init_rng(config.seed, StreamId::Init);
  RngStream noise_rng(config.seed, StreamId::Noise);
  RngStream acq_rng(config.seed, StreamId::Acquisition);
  RngStream fit_rng(config.seed, StreamId::Fitting);

  RunHistory hist;
  hist.config = config;
  hist.sigma = sigma;

  const SampleBatch init = lhs(config.n_init, gt.domain, init_rng);
  hist.data.append(init.points, evaluate_with_noise(gt, init.points, sigma, noise_rng),
                   0, norm);

  FitConfig fit_cfg = config.fit;
  GprModel model = fit(hist.data.x_norm, hist.data.y_norm, fit_cfg, fit_rng);

  auto make_record = [&](int iter, const GprModel& m) {
    const Incumbent inc = incumbent(m, hist.data.x_norm);
    IterationRecord rec;
    rec.iter = iter;
    rec.incumbent_x = hist.data.x_raw.row(inc.index).transpose();
    rec.mu_star = norm.denormalize_y(inc.mu_star);
    rec.max_y = hist.data.y_raw.maxCoeff();
    rec.ir_x = (inc.x_star - x_max_norm).norm();
    rec.ir_y = std::abs(inc.mu_star - y_max_norm);
    rec.lengthscales = m.params().lengthscales;
    rec.amplitude_sq = m.params().amplitude_sq;
    rec.gnv = m.gnv();
    return rec;
  };
  hist.init_record = make_record(0, model);

  hist.records.reserve(config.n_iter);
  for (int iter = 1; iter <= config.n_iter; ++iter) {
    const Eigen::MatrixXd batch_norm =
        pick_batch(model, config.acquisition, config.policy, unit, acq_rng,
                   config.maximize);
    Eigen::MatrixXd batch_raw(batch_norm.rows(), batch_norm.cols());
    for (Eigen::Index i = 0; i < batch_norm.rows(); ++i)
      batch_raw.row(i) = norm.denormalize_x(batch_norm.row(i).transpose()).transpose();
    const Eigen::VectorXd batch_y =
        evaluate_with_noise(gt, batch_raw, sigma, noise_rng);
    hist.data.append(batch_raw, batch_y, iter, norm);

    // Warm-start the refit from the previous optimum.
    fit_cfg.warm_start = HyperParams{model.params(), model.gnv()};
    model = fit(hist.data.x_norm, hist.data.y_norm, fit_cfg, fit_rng);

    IterationRecord rec = make_record(iter, model);
    rec.batch_x = batch_raw;
    rec.batch_y = batch_y;
    hist.records.push_back(std::move(rec));
  }

  hist.final_model = std::move(model);
  return hist;
}

std::vector<TracePoint> incumbent_trace(const RunHistory& history) {
  const GroundTruth& gt = GroundTruth::get(history.config.gt);
  std::vector<TracePoint> trace;
  trace.reserve(history.records.size());
  for (const auto& rec : history.records)
    trace.push_back({rec.iter, (rec.incumbent_x - gt.x_max).norm(), rec.mu_star,
                     rec.max_y});
  return trace;
}

}  // namespace bobench
