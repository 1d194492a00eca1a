#pragma once

#include <Eigen/Dense>

namespace grt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Stimulus-by-response matrix of predicted probabilities (rows sum to one).
using ProbabilityMatrix = Eigen::MatrixXd;

}  // namespace grt
