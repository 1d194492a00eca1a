#pragma once

// Multinomial log-likelihood, maximum-likelihood fitting, seeded simulation, and
// the likelihood comparison between a model and its equivalence twin.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "grt/identifiability.hpp"
#include "grt/model.hpp"
#include "grt/probability.hpp"

namespace grt {

double log_likelihood(const SingleSubjectModel& model, const ConfusionMatrix& data,
                      IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
/// Sum over subjects; one confusion matrix per subject, in subject order.
double log_likelihood(const GrtWindModel& model, std::span<const ConfusionMatrix> data,
                      IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
/// Single-subject classes take exactly one matrix.
double log_likelihood(const AnyModel& model, std::span<const ConfusionMatrix> data,
                      IntegrationRoute route = IntegrationRoute::TransformThenRectangle);

struct FitOptions {
  std::size_t restarts = 20;
  std::size_t max_iterations = 200000;  // per restart, over all simplex rounds
  double tolerance = 1e-8;  // simplex size at which a restart counts as converged
  std::uint64_t seed = 0;
  double jitter = 0.3;  // sd of the restart perturbation, unconstrained coordinates
  /// Starting point of restart 0 instead of the z-score initialization. Must
  /// match the class, size and scheme being fitted.
  std::optional<AnyModel> start;
};

/// Why the best restart stopped. Converged: simplex size below the tolerance.
/// Stalled: the best objective value stopped improving (typically at the
/// floating-point resolution of the likelihood, above the tolerance).
enum class Termination { Converged, Stalled, MaxIterations };

std::string_view to_string(Termination t);

struct FitResult {
  AnyModel model;
  double log_likelihood = 0.0;
  long n_free_parameters = 0;  // parameters actually estimated
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  std::size_t n_restarts_used = 0;
  double gradient_norm_at_solution = 0.0;  // central differences, unconstrained coordinates
  std::size_t best_restart = 0;
  std::size_t iterations = 0;  // of the best restart
  Termination termination = Termination::MaxIterations;
  DofReport audit;
};

/// Throws ShapeError when the data do not match the class/size, IdentifiabilityError
/// when the audit does not pass under `scheme`, OptimizationError when every
/// restart ends at a non-finite likelihood. For GRTwIND the subject count is
/// taken from `data`.
FitResult fit(std::span<const ConfusionMatrix> data, ModelClass cls, ModelSize size,
              const ConstraintScheme& scheme, const FitOptions& options = {});

/// Each stimulus row is an independent multinomial draw of `trials_per_stimulus`.
/// Deterministic in `seed`; subject k of a GRTwIND model uses the stream (seed, k),
/// and a single-subject model the stream (seed, 0).
ConfusionMatrix simulate(const SingleSubjectModel& model, std::uint64_t trials_per_stimulus,
                         std::uint64_t seed);
std::vector<ConfusionMatrix> simulate(const GrtWindModel& model, std::uint64_t trials_per_stimulus,
                                      std::uint64_t seed);
std::vector<ConfusionMatrix> simulate(const AnyModel& model, std::uint64_t trials_per_stimulus,
                                      std::uint64_t seed);

struct TwinLikelihoodReport {
  double original_log_likelihood = 0.0;  // oblique-coordinate route
  double twin_log_likelihood = 0.0;      // induce_ds image
  double delta = 0.0;                    // twin - original
  std::vector<double> per_subject_delta;  // GRTwIND only
  /// 2x2 only: log-likelihood change of the mean-variance normalized image.
  std::optional<double> normalized_delta;
  bool identity_twin = false;
};

inline constexpr double kTwinLikelihoodTolerance = 1e-6;

TwinLikelihoodReport likelihood_twin_check(const AnyModel& model,
                                           std::span<const ConfusionMatrix> data);

}  // namespace grt
