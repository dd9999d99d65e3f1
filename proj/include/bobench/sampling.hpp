#pragma once

#include <Eigen/Dense>

#include "bobench/objectives.hpp"
#include "bobench/rng.hpp"

namespace bobench {

enum class DesignKind { Lhs, Uniform };

struct SampleBatch {
  Eigen::MatrixXd points;  // n x d, input units
  DesignKind design;
};

/// Latin hypercube design: per dimension, each of the n equal-width strata
/// holds exactly one point, jittered uniformly within its stratum.
SampleBatch lhs(int n, const Domain& domain, RngStream& rng);

/// Uniform candidate pool for acquisition maximization.
SampleBatch candidates(int n, const Domain& domain, RngStream& rng);

}  // namespace bobench
