#include "bobench/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace bobench {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;
constexpr double kLog2Pi = 1.8378770664093455;
constexpr double kJitterStart = 1e-12;
constexpr double kJitterMax = 1e-6;

// Matern-5/2 radial profile and the common factor of its lengthscale
// derivative, as functions of r.
inline double matern_profile(double r) {
  const double s = kSqrt5 * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

inline double matern_dls_factor(double r) {
  // d k / d log L_k = amp^2 * (5/3) (1 + sqrt5 r) e^{-sqrt5 r} * dsq_k / L_k^2
  const double s = kSqrt5 * r;
  return (5.0 / 3.0) * (1.0 + s) * std::exp(-s);
}

Eigen::LLT<Eigen::MatrixXd> factorize_with_jitter(const Eigen::MatrixXd& k_noisy,
                                                  double* jitter_used) {
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double jitter = kJitterStart; jitter <= kJitterMax * 1.0000001;
       jitter *= 10.0) {
    Eigen::MatrixXd k = k_noisy;
    k.diagonal().array() += jitter;
    llt.compute(k);
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = jitter;
      return llt;
    }
  }
  throw FitError("covariance factorization failed after jitter escalation");
}

}  // namespace

Normalizer::Normalizer(const Domain& domain, double y_low, double y_high)
    : x_lower_(domain.lower()),
      x_width_(domain.upper() - domain.lower()),
      y_low_(y_low),
      y_high_(y_high) {
  if (!(y_low < y_high))
    throw std::invalid_argument("normalizer requires y_low < y_high");
}

Normalizer Normalizer::for_gt(const GroundTruth& gt) {
  return Normalizer(gt.domain, gt.y_low, gt.y_high);
}

Eigen::VectorXd Normalizer::normalize_x(const Eigen::VectorXd& x) const {
  return (x - x_lower_).cwiseQuotient(x_width_);
}

Eigen::VectorXd Normalizer::denormalize_x(const Eigen::VectorXd& u) const {
  return x_lower_ + u.cwiseProduct(x_width_);
}

Eigen::MatrixXd Normalizer::normalize_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out.row(i) = normalize_x(x.row(i).transpose()).transpose();
  return out;
}

void Dataset::append(const Eigen::MatrixXd& x_rows, const Eigen::VectorXd& y_vals,
                     int iter, const Normalizer& norm) {
  const int n_old = size();
  const int n_new = static_cast<int>(y_vals.size());
  if (x_rows.rows() != n_new)
    throw std::invalid_argument("dataset append: row count mismatch");
  if (n_old == 0) {
    x_raw = x_rows;
    y_raw = y_vals;
  } else {
    x_raw.conservativeResize(n_old + n_new, Eigen::NoChange);
    x_raw.bottomRows(n_new) = x_rows;
    y_raw.conservativeResize(n_old + n_new);
    y_raw.tail(n_new) = y_vals;
  }
  x_norm = norm.normalize_rows(x_raw);
  y_norm.resize(n_old + n_new);
  for (int i = 0; i < n_old + n_new; ++i) y_norm[i] = norm.normalize_y(y_raw[i]);
  for (int i = 0; i < n_new; ++i) iteration.push_back(iter);
}

double kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
              const KernelParams& params) {
  double r2 = 0.0;
  for (Eigen::Index k = 0; k < x1.size(); ++k) {
    const double d = (x1[k] - x2[k]) / params.lengthscales[k];
    r2 += d * d;
  }
  return params.amplitude_sq * matern_profile(std::sqrt(r2));
}

GprModel GprModel::build(Eigen::MatrixXd x_train, Eigen::VectorXd y_train,
                         KernelParams params, double gnv) {
  GprModel m;
  m.x_train_ = std::move(x_train);
  m.y_train_ = std::move(y_train);
  m.params_ = std::move(params);
  m.gnv_ = gnv;
  m.mean_shift_ = m.size() > 0 ? m.y_train_.mean() : 0.0;
  m.refactorize();
  return m;
}

GprModel GprModel::prior(KernelParams params, double gnv) {
  GprModel m;
  m.params_ = std::move(params);
  m.gnv_ = gnv;
  return m;
}

GprModel GprModel::with_fantasy(const Eigen::VectorXd& x, double y) const {
  GprModel m;
  const int n = size();
  m.x_train_.resize(n + 1, x.size());
  if (n > 0) m.x_train_.topRows(n) = x_train_;
  m.x_train_.row(n) = x.transpose();
  m.y_train_.resize(n + 1);
  if (n > 0) m.y_train_.head(n) = y_train_;
  m.y_train_[n] = y;
  m.params_ = params_;
  m.gnv_ = gnv_;
  m.mean_shift_ = mean_shift_;  // frozen within a batch
  m.refactorize();
  return m;
}

void GprModel::refactorize() {
  const int n = size();
  if (n == 0) return;
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = params_.amplitude_sq + gnv_;
    for (int j = 0; j < i; ++j) {
      const double v =
          kernel(x_train_.row(i).transpose(), x_train_.row(j).transpose(), params_);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  auto llt = factorize_with_jitter(k, &jitter_);
  chol_ = llt.matrixL();
  alpha_ = llt.solve(y_train_ - Eigen::VectorXd::Constant(n, mean_shift_));
}

std::pair<double, double> GprModel::posterior(const Eigen::VectorXd& x) const {
  const int n = size();
  if (n == 0) return {mean_shift_, params_.amplitude_sq};
  Eigen::VectorXd kvec(n);
  for (int i = 0; i < n; ++i)
    kvec[i] = kernel(x, x_train_.row(i).transpose(), params_);
  const double mean = mean_shift_ + kvec.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kvec);
  const double var = params_.amplitude_sq - v.squaredNorm();
  return {mean, std::max(var, 0.0)};
}

double GprModel::posterior_mean(const Eigen::VectorXd& x) const {
  const int n = size();
  if (n == 0) return mean_shift_;
  Eigen::VectorXd kvec(n);
  for (int i = 0; i < n; ++i)
    kvec[i] = kernel(x, x_train_.row(i).transpose(), params_);
  return mean_shift_ + kvec.dot(alpha_);
}

double GprModel::posterior_raw_variance(const Eigen::VectorXd& x) const {
  const int n = size();
  if (n == 0) return params_.amplitude_sq;
  Eigen::VectorXd kvec(n);
  for (int i = 0; i < n; ++i)
    kvec[i] = kernel(x, x_train_.row(i).transpose(), params_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kvec);
  return params_.amplitude_sq - v.squaredNorm();
}

void GprModel::posterior_many(const Eigen::MatrixXd& xs, Eigen::VectorXd& mean,
                              Eigen::VectorXd& var) const {
  const int m = static_cast<int>(xs.rows());
  const int n = size();
  mean.resize(m);
  var.resize(m);
  if (n == 0) {
    mean.setConstant(mean_shift_);
    var.setConstant(params_.amplitude_sq);
    return;
  }
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index k = 0; k < xs.cols(); ++k) {
    const double inv_l = 1.0 / params_.lengthscales[k];
    Eigen::MatrixXd diff = (xs.col(k) * inv_l).replicate(1, n);
    diff.rowwise() -= (x_train_.col(k) * inv_l).transpose();
    r2 += diff.cwiseProduct(diff);
  }
  Eigen::MatrixXd kx(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      kx(i, j) = params_.amplitude_sq * matern_profile(std::sqrt(r2(i, j)));
  mean = kx * alpha_;
  mean.array() += mean_shift_;
  const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(kx.transpose());
  for (int i = 0; i < m; ++i)
    var[i] = std::max(params_.amplitude_sq - v.col(i).squaredNorm(), 0.0);
}

double GprModel::log_marginal_likelihood() const {
  const int n = size();
  if (n == 0) return 0.0;
  const Eigen::VectorXd yc =
      y_train_ - Eigen::VectorXd::Constant(n, mean_shift_);
  double log_det_half = 0.0;
  for (int i = 0; i < n; ++i) log_det_half += std::log(chol_(i, i));
  return -0.5 * yc.dot(alpha_) - log_det_half - 0.5 * n * kLog2Pi;
}

Eigen::VectorXd GprModel::lml_gradient() const {
  const int n = size();
  const int d = static_cast<int>(params_.lengthscales.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 2);
  if (n == 0) return grad;

  // W = alpha alpha^T - Ky^{-1}
  Eigen::MatrixXd kinv = Eigen::MatrixXd::Identity(n, n);
  chol_.triangularView<Eigen::Lower>().solveInPlace(kinv);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(kinv);
  const Eigen::MatrixXd w = alpha_ * alpha_.transpose() - kinv;

  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 0.0;
    for (int j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double dd = (x_train_(i, k) - x_train_(j, k)) / params_.lengthscales[k];
        r2 += dd * dd;
      }
      r(i, j) = r(j, i) = std::sqrt(r2);
    }
  }

  // d/d log amp^2: the noise-free kernel matrix itself
  double g_amp = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g_amp += w(i, j) * params_.amplitude_sq * matern_profile(r(i, j));
  grad[0] = 0.5 * g_amp;

  // d/d log L_k
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h(i, j) = w(i, j) * params_.amplitude_sq * matern_dls_factor(r(i, j));
  for (int k = 0; k < d; ++k) {
    const double inv_l2 =
        1.0 / (params_.lengthscales[k] * params_.lengthscales[k]);
    double g = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double dd = x_train_(i, k) - x_train_(j, k);
        g += h(i, j) * dd * dd * inv_l2;
      }
    grad[1 + k] = 0.5 * g;
  }

  // d/d log gnv
  grad[d + 1] = 0.5 * gnv_ * w.trace();
  return grad;
}

// ---------------------------------------------------------------------------
// Hyperparameter fitting
// ---------------------------------------------------------------------------

namespace {

// Workspace for repeated LML evaluations on one dataset: per-dimension
// squared coordinate differences are hyperparameter-independent.
class LmlObjective {
 public:
  LmlObjective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
      : n_(static_cast<int>(y.size())), d_(static_cast<int>(x.cols())) {
    shift_ = y.mean();
    yc_ = y - Eigen::VectorXd::Constant(n_, shift_);
    dsq_.reserve(d_);
    for (int k = 0; k < d_; ++k) {
      Eigen::MatrixXd dk(n_, n_);
      for (int i = 0; i < n_; ++i) {
        dk(i, i) = 0.0;
        for (int j = 0; j < i; ++j) {
          const double dd = x(i, k) - x(j, k);
          dk(i, j) = dk(j, i) = dd * dd;
        }
      }
      dsq_.push_back(std::move(dk));
    }
  }

  int dim() const { return d_; }
  double y_variance() const { return n_ > 1 ? yc_.squaredNorm() / n_ : 0.0; }

  // theta = {log amp_sq, log ls..., log gnv}; throws FitError if the
  // covariance cannot be factorized.
  double eval(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const double amp_sq = std::exp(theta[0]);
    const double gnv = std::exp(theta[d_ + 1]);

    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(n_, n_);
    for (int k = 0; k < d_; ++k) {
      const double inv_l2 = std::exp(-2.0 * theta[1 + k]);
      r2 += inv_l2 * dsq_[k];
    }
    Eigen::MatrixXd r = r2.array().max(0.0).sqrt().matrix();
    Eigen::MatrixXd ky(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = amp_sq * matern_profile(r(i, j));
        ky(i, j) = v;
        ky(j, i) = v;
      }
    ky.diagonal().array() += gnv;

    double jitter = 0.0;
    auto llt = factorize_with_jitter(ky, &jitter);
    const Eigen::MatrixXd chol = llt.matrixL();
    const Eigen::VectorXd alpha = llt.solve(yc_);

    double log_det_half = 0.0;
    for (int i = 0; i < n_; ++i) log_det_half += std::log(chol(i, i));
    const double lml = -0.5 * yc_.dot(alpha) - log_det_half - 0.5 * n_ * kLog2Pi;

    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n_, n_);
    llt.solveInPlace(w);
    w = alpha * alpha.transpose() - w;

    grad.resize(d_ + 2);
    double g_amp = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        g_amp += w(i, j) * amp_sq * matern_profile(r(i, j));
    grad[0] = 0.5 * g_amp;

    for (int k = 0; k < d_; ++k) {
      const double inv_l2 = std::exp(-2.0 * theta[1 + k]);
      double g = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          g += w(i, j) * amp_sq * matern_dls_factor(r(i, j)) * dsq_[k](i, j) * inv_l2;
      grad[1 + k] = 0.5 * g;
    }
    grad[d_ + 1] = 0.5 * gnv * w.trace();
    return lml;
  }

  double shift() const { return shift_; }

 private:
  int n_, d_;
  double shift_ = 0.0;
  Eigen::VectorXd yc_;
  std::vector<Eigen::MatrixXd> dsq_;
};

struct Bounds {
  Eigen::VectorXd lo, hi;
};

Bounds log_bounds(const FitConfig& cfg, int d) {
  Bounds b;
  b.lo.resize(d + 2);
  b.hi.resize(d + 2);
  b.lo[0] = std::log(cfg.amp_lo);
  b.hi[0] = std::log(cfg.amp_hi);
  for (int k = 0; k < d; ++k) {
    b.lo[1 + k] = std::log(cfg.ls_lo);
    b.hi[1 + k] = std::log(cfg.ls_hi);
  }
  b.lo[d + 1] = std::log(cfg.gnv_floor);
  b.hi[d + 1] = std::log(cfg.gnv_hi);
  return b;
}

Eigen::VectorXd clamp_theta(Eigen::VectorXd theta, const Bounds& b) {
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    theta[i] = std::clamp(theta[i], b.lo[i], b.hi[i]);
  return theta;
}

// Projected L-BFGS ascent on the LML. Returns the achieved LML; theta is
// updated in place.
double ascend(const LmlObjective& obj, Eigen::VectorXd& theta, const Bounds& b,
              const FitConfig& cfg, double* initial_lml) {
  const int p = static_cast<int>(theta.size());
  theta = clamp_theta(std::move(theta), b);

  Eigen::VectorXd grad(p);
  double f = obj.eval(theta, grad);  // may throw; caller handles
  if (initial_lml) *initial_lml = f;

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;  // (s, y)
  const double bound_eps = 1e-12;
  int stall = 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd pg = grad;
    for (int i = 0; i < p; ++i) {
      if (theta[i] <= b.lo[i] + bound_eps && pg[i] < 0.0) pg[i] = 0.0;
      if (theta[i] >= b.hi[i] - bound_eps && pg[i] > 0.0) pg[i] = 0.0;
    }
    if (pg.lpNorm<Eigen::Infinity>() < 1e-8) break;

    // two-loop recursion on the ascent direction
    Eigen::VectorXd dir = pg;
    std::vector<double> alpha_mem(memory.size());
    {
      int idx = static_cast<int>(memory.size()) - 1;
      for (auto rit = memory.rbegin(); rit != memory.rend(); ++rit, --idx) {
        const auto& [s, y] = *rit;
        const double rho = 1.0 / y.dot(s);
        alpha_mem[idx] = rho * s.dot(dir);
        dir -= alpha_mem[idx] * y;
      }
      if (!memory.empty()) {
        const auto& [s, y] = memory.back();
        dir *= s.dot(y) / y.dot(y);
      }
      int i2 = 0;
      for (auto it2 = memory.begin(); it2 != memory.end(); ++it2, ++i2) {
        const auto& [s, y] = *it2;
        const double rho = 1.0 / y.dot(s);
        const double beta = rho * y.dot(dir);
        dir += (alpha_mem[i2] - beta) * s;
      }
    }
    if (dir.dot(pg) <= 0.0) dir = pg;

    // backtracking line search with bound projection
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd theta_new, grad_new(p);
    double f_new = 0.0;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      theta_new = clamp_theta(theta + t * dir, b);
      const Eigen::VectorXd step = theta_new - theta;
      if (step.lpNorm<Eigen::Infinity>() < 1e-15) break;
      bool ok = true;
      try {
        f_new = obj.eval(theta_new, grad_new);
      } catch (const FitError&) {
        ok = false;
      }
      if (ok && f_new >= f + 1e-4 * grad.dot(step)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const Eigen::VectorXd s = theta_new - theta;
    const Eigen::VectorXd yv = grad - grad_new;  // curvature pair for -LML
    if (s.dot(yv) > 1e-12) {
      memory.emplace_back(s, yv);
      if (memory.size() > 8) memory.pop_front();
    }

    const double improvement = f_new - f;
    theta = std::move(theta_new);
    grad = grad_new;
    f = f_new;
    if (improvement <= cfg.rel_tol * (std::abs(f) + 1.0)) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }
  }
  return f;
}

}  // namespace

GprModel fit(const Eigen::MatrixXd& x_norm, const Eigen::VectorXd& y_norm,
             const FitConfig& cfg, RngStream& rng, FitDiagnostics* diag) {
  const int n = static_cast<int>(y_norm.size());
  const int d = static_cast<int>(x_norm.cols());
  if (n < 2) throw std::invalid_argument("fit requires at least 2 points");
  if (!x_norm.allFinite() || !y_norm.allFinite())
    throw std::invalid_argument("fit requires finite inputs");

  const LmlObjective obj(x_norm, y_norm);
  const Bounds b = log_bounds(cfg, d);

  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd t0(d + 2);
    if (cfg.warm_start) {
      t0[0] = std::log(cfg.warm_start->kernel.amplitude_sq);
      for (int k = 0; k < d; ++k)
        t0[1 + k] = std::log(cfg.warm_start->kernel.lengthscales[k]);
      t0[d + 1] = std::log(cfg.warm_start->gnv);
    } else {
      t0[0] = std::log(std::clamp(obj.y_variance(), 1e-4, cfg.amp_hi));
      for (int k = 0; k < d; ++k) t0[1 + k] = std::log(0.5);
      t0[d + 1] = std::log(cfg.gnv_init);
    }
    starts.push_back(clamp_theta(std::move(t0), b));
  }
  for (int s = 1; s < cfg.restarts; ++s) {
    Eigen::VectorXd t(d + 2);
    t[0] = rng.uniform(b.lo[0], b.hi[0]);
    for (int k = 0; k < d; ++k) t[1 + k] = rng.uniform(b.lo[1 + k], b.hi[1 + k]);
    t[d + 1] = rng.uniform(std::log(1e-9), std::log(1e-2));
    starts.push_back(clamp_theta(std::move(t), b));
  }

  double best_lml = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  if (diag) {
    diag->restart_initial_lml.clear();
    diag->restart_final_lml.clear();
  }
  for (auto& theta : starts) {
    double init_lml = 0.0;
    double final_lml;
    try {
      final_lml = ascend(obj, theta, b, cfg, &init_lml);
    } catch (const FitError&) {
      continue;  // restart's very first factorization failed
    }
    if (diag) {
      diag->restart_initial_lml.push_back(init_lml);
      diag->restart_final_lml.push_back(final_lml);
    }
    if (final_lml > best_lml) {
      best_lml = final_lml;
      best_theta = theta;
    }
  }
  if (!best_theta.size())
    throw FitError("all fit restarts failed covariance factorization");
  if (diag) diag->best_lml = best_lml;

  KernelParams params;
  params.amplitude_sq = std::exp(best_theta[0]);
  params.lengthscales.resize(d);
  for (int k = 0; k < d; ++k) params.lengthscales[k] = std::exp(best_theta[1 + k]);
  return GprModel::build(x_norm, y_norm, params, std::exp(best_theta[d + 1]));
}

}  // namespace bobench
