#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bobench/objectives.hpp"

using namespace bobench;

namespace {

Eigen::VectorXd vec6(double a, double b, double c, double d, double e, double f) {
  Eigen::VectorXd v(6);
  v << a, b, c, d, e, f;
  return v;
}

// Test-side local maximizer: coordinate ascent with shrinking steps,
// independent of any library optimizer.
double local_ascent(const GroundTruth& gt, Eigen::VectorXd& x) {
  double fx = gt.value(x);
  Eigen::VectorXd step = 0.05 * (gt.domain.upper() - gt.domain.lower());
  while (step.maxCoeff() > 1e-7 * gt.domain.width(0)) {
    bool improved = false;
    for (int k = 0; k < x.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd cand = x;
        cand[k] = std::clamp(x[k] + sgn * step[k], gt.domain.lower()[k],
                             gt.domain.upper()[k]);
        const double fc = gt.value(cand);
        if (fc > fx) {
          fx = fc;
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return fx;
}

}  // namespace

TEST_CASE("ackley value anchors") {
  CHECK(eval_ackley(Eigen::VectorXd::Zero(6)) == 0.0);
  // direct evaluation at the far corner, frozen
  const double corner = eval_ackley(vec6(32.768, 32.768, 32.768, 32.768, 32.768, 32.768));
  CHECK(corner == doctest::Approx(-21.570311151282485).epsilon(1e-12));
}

TEST_CASE("ackley is even and non-positive") {
  RngStream rng(7);
  const auto& gt = GroundTruth::ackley();
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x(6);
    for (int k = 0; k < 6; ++k) x[k] = rng.uniform(-32.768, 32.768);
    CHECK(eval_ackley(x) == doctest::Approx(eval_ackley(-x)).epsilon(1e-12));
  }
  for (int i = 0; i < 100000; ++i) {
    Eigen::VectorXd x(6);
    for (int k = 0; k < 6; ++k) x[k] = rng.uniform(-32.768, 32.768);
    const double v = gt.value(x);
    CHECK(v <= 0.0);
    CHECK(v >= gt.y_low);
  }
}

TEST_CASE("ackley domain violations rejected") {
  CHECK_THROWS_AS(eval_ackley(vec6(0, 0, 0, 0, 0, 33.0)), std::domain_error);
  CHECK_THROWS_AS(eval_ackley(Eigen::VectorXd::Zero(5)), std::domain_error);
}

TEST_CASE("hartmann value anchors") {
  const auto& gt = GroundTruth::hartmann();
  const double at_max = eval_hartmann(gt.x_max);
  CHECK(std::abs(at_max - 3.32237) < 1e-4);
  CHECK(std::abs(at_max - gt.y_max) < 1e-6);
  CHECK_THROWS_AS(eval_hartmann(vec6(0, 0, 0, 0, 0, 1.5)), std::domain_error);
}

TEST_CASE("hartmann positive and bounded on the cube") {
  RngStream rng(11);
  const auto& gt = GroundTruth::hartmann();
  for (int i = 0; i < 100000; ++i) {
    Eigen::VectorXd x(6);
    for (int k = 0; k < 6; ++k) x[k] = rng.uniform();
    const double v = gt.value(x);
    CHECK(v > 0.0);
    CHECK(v < 3.32237 + 1e-6);
  }
}

TEST_CASE("multi-start ascent confirms both global maxima") {
  for (const auto* gt : {&GroundTruth::ackley(), &GroundTruth::hartmann()}) {
    RngStream rng(23);
    double best = -1e300;
    for (int s = 0; s < 1000; ++s) {
      Eigen::VectorXd x(6);
      for (int k = 0; k < 6; ++k)
        x[k] = rng.uniform(gt->domain.lower()[k], gt->domain.upper()[k]);
      best = std::max(best, local_ascent(*gt, x));
    }
    CHECK(best <= gt->y_max + 1e-4);
    CHECK(best > gt->y_max - 1e-3);  // some start lands in the global basin
  }
}

TEST_CASE("hartmann second maximum from multi-start ascent") {
  const auto& gt = GroundTruth::hartmann();
  REQUIRE(gt.x_max2.has_value());
  RngStream rng(29);
  // Collect local optima; the runner-up cluster is the second maximum.
  double best2 = -1e300;
  Eigen::VectorXd x2;
  for (int s = 0; s < 1500; ++s) {
    Eigen::VectorXd x(6);
    for (int k = 0; k < 6; ++k) x[k] = rng.uniform();
    const double v = local_ascent(gt, x);
    if (v < gt.y_max - 1e-3 && v > best2) {
      best2 = v;
      x2 = x;
    }
  }
  CHECK(best2 == doctest::Approx(*gt.y_max2).epsilon(1e-7));
  CHECK((x2 - *gt.x_max2).norm() < 1e-3);
  // The stored second-maximum value agrees with the level reported for this
  // objective elsewhere to about a part in a thousand.
  CHECK(std::abs(*gt.y_max2 - 3.20452) < 1.5e-3);
  CHECK((*gt.x_max2 - gt.x_max).norm() == doctest::Approx(1.1026932608).epsilon(1e-6));
}

TEST_CASE("noise sigma per mode") {
  const auto& ack = GroundTruth::ackley();
  const auto& hart = GroundTruth::hartmann();
  CHECK(noise_sigma({NoiseMode::None, 0.5, 0.0}, ack) == 0.0);
  CHECK(noise_sigma({NoiseMode::GtMax, 0.05, 0.0}, hart) ==
        doctest::Approx(0.1661185).epsilon(1e-12));
  CHECK(noise_sigma({NoiseMode::GtMax, 0.10, 0.0}, ack) ==
        doctest::Approx(2.23).epsilon(1e-12));
  // kernel-amplitude mode: normalized sigma is level * amplitude
  const double sigma = noise_sigma({NoiseMode::KernelAmplitude, 0.10, 0.192}, ack);
  CHECK(sigma / ack.y_range_width() == doctest::Approx(0.0192).epsilon(1e-12));
}

TEST_CASE("add_noise moments and determinism") {
  RngStream zero_rng(1);
  CHECK(add_noise(-3.2, 0.0, zero_rng) == -3.2);
  RngStream rng(42);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = add_noise(0.0, 0.1, rng);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(mean) < 0.002);
  CHECK(std::abs(sd - 0.1) < 0.003);

  RngStream a(123), b(123);
  for (int i = 0; i < 50; ++i) CHECK(add_noise(1.0, 0.3, a) == add_noise(1.0, 0.3, b));
}

TEST_CASE("projection grid: structure and slice maxima") {
  const auto& ack = GroundTruth::ackley();
  RngStream rng(5);
  const int res = 5;
  const Eigen::MatrixXd grid = gt_projection_grid(ack, 0, 1, res, rng);
  REQUIRE(grid.rows() == res);
  REQUIRE(grid.cols() == res);

  // Independent oracle for one off-center cell: dense 4D grid over the
  // remaining dims at the cell center (odd per-dim count includes 0, where
  // the slice maximum sits), refined by nothing - the grid value must come
  // out close to it.
  const double a = ack.domain.lower()[0] + 3.5 * ack.domain.width(0) / res;
  const double b = ack.domain.lower()[1] + 3.5 * ack.domain.width(1) / res;
  double oracle = -1e300;
  const int g = 7;
  Eigen::VectorXd x(6);
  x[0] = a;
  x[1] = b;
  for (int i2 = 0; i2 < g; ++i2)
    for (int i3 = 0; i3 < g; ++i3)
      for (int i4 = 0; i4 < g; ++i4)
        for (int i5 = 0; i5 < g; ++i5) {
          auto coord = [&](int idx) {
            return ack.domain.lower()[2] + (idx + 0.5) * ack.domain.width(2) / g;
          };
          x[2] = coord(i2);
          x[3] = coord(i3);
          x[4] = coord(i4);
          x[5] = coord(i5);
          oracle = std::max(oracle, ack.value(x));
        }
  // The analytic slice maximum has the remaining dims at 0.
  Eigen::VectorXd at_zero = Eigen::VectorXd::Zero(6);
  at_zero[0] = a;
  at_zero[1] = b;
  const double analytic = ack.value(at_zero);
  CHECK(oracle <= analytic + 1e-12);
  CHECK(grid(3, 3) == doctest::Approx(analytic).epsilon(0.02));
  CHECK(grid(3, 3) >= oracle - 0.5);

  // Center cell of an odd-resolution grid sits at the origin slice.
  CHECK(std::abs(grid(2, 2)) < 5e-3);

  const auto& hart = GroundTruth::hartmann();
  RngStream rng2(6);
  const Eigen::MatrixXd hgrid = gt_projection_grid(hart, 0, 2, 4, rng2, 800);
  for (int i = 0; i < hgrid.rows(); ++i)
    for (int j = 0; j < hgrid.cols(); ++j)
      CHECK(hgrid(i, j) <= 3.32237 + 1e-9);

  CHECK_THROWS_AS(gt_projection_grid(ack, 1, 1, 4, rng), std::invalid_argument);
  CHECK_THROWS_AS(gt_projection_grid(ack, 0, 1, 1, rng), std::invalid_argument);
}
