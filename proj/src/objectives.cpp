#include "bobench/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bobench {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Standard Hartmann-6 constants.
constexpr double kHartAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartA[4][6] = {
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
};
constexpr double kHartP[4][6] = {
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
};

// Second local maximum of the flipped Hartmann-6, located by multi-start
// gradient ascent; the corresponding value is 3.2031619183958...
constexpr double kHartXmax2[6] = {0.40465313, 0.88244492, 0.84610157,
                                  0.57398969, 0.13892660, 0.03849589};

void check_in_domain(const Domain& d, const Eigen::VectorXd& x) {
  if (x.size() != d.dim())
    throw std::domain_error("objective input has wrong dimension");
  if (!d.contains(x, 1e-12))
    throw std::domain_error("objective input outside the function domain");
}

double eval_ackley_unchecked(const Eigen::VectorXd& x) {
  const double d = static_cast<double>(x.size());
  const double rms = std::sqrt(x.squaredNorm() / d);
  double cos_sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) cos_sum += std::cos(2.0 * kPi * x[i]);
  return 20.0 * (std::exp(-0.2 * rms) - 1.0) + std::exp(cos_sum / d) -
         std::exp(1.0);
}

double eval_hartmann_unchecked(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double dj = x[j] - kHartP[i][j];
      inner += kHartA[i][j] * dj * dj;
    }
    sum += kHartAlpha[i] * std::exp(-inner);
  }
  return sum;
}

// Coordinate pattern search maximizing f over the box, for the projection
// slices. Starts with a large step so it can hop across the cosine ripples.
template <typename F>
void pattern_search(F&& f, Eigen::VectorXd& x, double& fx,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                    int budget) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd step = 0.25 * (hi - lo);
  int evals = 0;
  while (evals < budget && step.maxCoeff() > 1e-9) {
    bool improved = false;
    for (int i = 0; i < d && evals < budget; ++i) {
      for (double sgn : {+1.0, -1.0}) {
        Eigen::VectorXd cand = x;
        cand[i] = std::clamp(x[i] + sgn * step[i], lo[i], hi[i]);
        if (cand[i] == x[i]) continue;
        const double fc = f(cand);
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
}

}  // namespace

Domain::Domain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0)
    throw std::invalid_argument("domain bounds must have equal nonzero size");
  for (Eigen::Index i = 0; i < lower_.size(); ++i)
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("domain requires lower[i] < upper[i]");
}

bool Domain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  return true;
}

Eigen::VectorXd Domain::clip(Eigen::VectorXd x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], lower_[i], upper_[i]);
  return x;
}

Domain Domain::unit_cube(int d) {
  return Domain(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
}

double eval_ackley(const Eigen::VectorXd& x) {
  check_in_domain(GroundTruth::ackley().domain, x);
  return eval_ackley_unchecked(x);
}

double eval_hartmann(const Eigen::VectorXd& x) {
  check_in_domain(GroundTruth::hartmann().domain, x);
  return eval_hartmann_unchecked(x);
}

double GroundTruth::value(const Eigen::VectorXd& x) const {
  check_in_domain(domain, x);
  return id == Objective::Ackley ? eval_ackley_unchecked(x)
                                 : eval_hartmann_unchecked(x);
}

const GroundTruth& GroundTruth::ackley() {
  static const GroundTruth gt = [] {
    const int d = 6;
    GroundTruth g{Objective::Ackley,
                  Domain(Eigen::VectorXd::Constant(d, -32.768),
                         Eigen::VectorXd::Constant(d, 32.768)),
                  Eigen::VectorXd::Zero(d),
                  0.0,
                  std::nullopt,
                  std::nullopt,
                  -22.3,
                  0.0};
    return g;
  }();
  return gt;
}

const GroundTruth& GroundTruth::hartmann() {
  static const GroundTruth gt = [] {
    const int d = 6;
    Eigen::VectorXd xm(d), xm2(d);
    xm << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
    for (int i = 0; i < d; ++i) xm2[i] = kHartXmax2[i];
    GroundTruth g{Objective::Hartmann,
                  Domain::unit_cube(d),
                  xm,
                  3.3223680113913387,  // value at x_max; 3.32237 rounded
                  xm2,
                  3.2031619183958,
                  0.0,
                  3.32237};
    return g;
  }();
  return gt;
}

const GroundTruth& GroundTruth::get(Objective id) {
  return id == Objective::Ackley ? ackley() : hartmann();
}

double default_reference_amplitude(Objective id) {
  return id == Objective::Ackley ? 0.192 : 0.184;
}

double noise_sigma(const NoiseSpec& spec, const GroundTruth& gt) {
  if (spec.level < 0.0) throw std::invalid_argument("noise level must be >= 0");
  switch (spec.mode) {
    case NoiseMode::None:
      return 0.0;
    case NoiseMode::GtMax:
      // Magnitude of the ground-truth scale: |y_low| for the sign-flipped
      // Ackley (whose maximum is 0), y_max for Hartmann.
      return spec.level * std::max(std::abs(gt.y_low), std::abs(gt.y_high));
    case NoiseMode::KernelAmplitude:
      return spec.level * spec.reference_amplitude * gt.y_range_width();
  }
  throw std::invalid_argument("unknown noise mode");
}

double add_noise(double y_true, double sigma, RngStream& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return y_true;
  return y_true + sigma * rng.normal();
}

Eigen::MatrixXd gt_projection_grid(const GroundTruth& gt, int dim_a, int dim_b,
                                   int resolution, RngStream& rng,
                                   int n_samples) {
  const int d = gt.domain.dim();
  if (dim_a == dim_b || dim_a < 0 || dim_b < 0 || dim_a >= d || dim_b >= d)
    throw std::invalid_argument("projection dimensions must be distinct and in range");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");

  std::vector<int> rest;
  for (int i = 0; i < d; ++i)
    if (i != dim_a && i != dim_b) rest.push_back(i);
  const int m = static_cast<int>(rest.size());

  Eigen::VectorXd rlo(m), rhi(m);
  for (int k = 0; k < m; ++k) {
    rlo[k] = gt.domain.lower()[rest[k]];
    rhi[k] = gt.domain.upper()[rest[k]];
  }

  Eigen::MatrixXd grid(resolution, resolution);
  const double wa = gt.domain.width(dim_a) / resolution;
  const double wb = gt.domain.width(dim_b) / resolution;

  Eigen::VectorXd x = gt.domain.midpoint();
  auto slice_value = [&](double a, double b, const Eigen::VectorXd& r) {
    x[dim_a] = a;
    x[dim_b] = b;
    for (int k = 0; k < m; ++k) x[rest[k]] = r[k];
    return gt.id == Objective::Ackley ? eval_ackley_unchecked(x)
                                      : eval_hartmann_unchecked(x);
  };

  for (int i = 0; i < resolution; ++i) {
    const double a = gt.domain.lower()[dim_a] + (i + 0.5) * wa;
    for (int j = 0; j < resolution; ++j) {
      const double b = gt.domain.lower()[dim_b] + (j + 0.5) * wb;

      // Coarse random search over the remaining dimensions, keep the 5 best.
      std::vector<std::pair<double, Eigen::VectorXd>> best;
      for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd r(m);
        for (int k = 0; k < m; ++k) r[k] = rng.uniform(rlo[k], rhi[k]);
        const double v = slice_value(a, b, r);
        if (best.size() < 5) {
          best.emplace_back(v, std::move(r));
          std::sort(best.begin(), best.end(),
                    [](const auto& p, const auto& q) { return p.first > q.first; });
        } else if (v > best.back().first) {
          best.back() = {v, std::move(r)};
          std::sort(best.begin(), best.end(),
                    [](const auto& p, const auto& q) { return p.first > q.first; });
        }
      }

      double cell = best.front().first;
      for (auto& [v, r] : best) {
        double fv = v;
        pattern_search([&](const Eigen::VectorXd& rr) { return slice_value(a, b, rr); },
                       r, fv, rlo, rhi, 300);
        cell = std::max(cell, fv);
      }
      grid(i, j) = cell;
    }
  }
  return grid;
}

}  // namespace bobench
