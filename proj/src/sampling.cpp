#include "bobench/sampling.hpp"

#include <numeric>
#include <vector>

namespace bobench {

SampleBatch lhs(int n, const Domain& domain, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("lhs requires n >= 1");
  const int d = domain.dim();
  Eigen::MatrixXd pts(n, d);
  std::vector<int> perm(n);
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates on our own stream for cross-platform determinism
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.index(static_cast<std::size_t>(i) + 1)]);
    const double w = domain.width(j) / n;
    for (int i = 0; i < n; ++i)
      pts(i, j) = domain.lower()[j] + (perm[i] + rng.uniform()) * w;
  }
  return {std::move(pts), DesignKind::Lhs};
}

SampleBatch candidates(int n, const Domain& domain, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("candidates requires n >= 1");
  const int d = domain.dim();
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      pts(i, j) = rng.uniform(domain.lower()[j], domain.upper()[j]);
  return {std::move(pts), DesignKind::Uniform};
}

}  // namespace bobench
