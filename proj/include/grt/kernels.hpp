#pragma once

// Batch kernels. Each OpenMP version has a serial twin computing the same values
// in the same order; the parallel versions are bit-identical to the serial ones.

#include <span>
#include <vector>

#include "grt/core_model.hpp"
#include "grt/model.hpp"
#include "grt/probability.hpp"

namespace grt {

/// Worker cap: GRT_KIT_THREADS when set to a positive integer, otherwise the
/// OpenMP default.
int thread_limit();

/// Probability floor applied to every cell before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

/// sum_s sum_r count[s][r] * ln(max(p[s][r], 1e-300)). Throws ShapeError on mismatch.
double multinomial_log_likelihood(const ProbabilityMatrix& p, const ConfusionMatrix& data);

std::vector<ProbabilityMatrix> batch_probabilities(
    std::span<const SingleSubjectModel> models,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
std::vector<ProbabilityMatrix> batch_probabilities_serial(
    std::span<const SingleSubjectModel> models,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);

/// Per-item log-likelihoods of models[i] on data[i].
std::vector<double> batch_log_likelihood(
    std::span<const SingleSubjectModel> models, std::span<const ConfusionMatrix> data,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
std::vector<double> batch_log_likelihood_serial(
    std::span<const SingleSubjectModel> models, std::span<const ConfusionMatrix> data,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);

}  // namespace grt
