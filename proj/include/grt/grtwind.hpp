#pragma once

// GRTwIND: a shared group-level set of four perceptual distributions, modified
// per subject by a global scale kappa and a dimension weight lambda, with
// per-subject linear bounds. Also the subject-specific rotation/shear
// construction that trades subject-level DS failures for subject-varying
// perceptual distributions.

#include <array>
#include <cstddef>
#include <vector>

#include "grt/core_model.hpp"
#include "grt/transforms.hpp"

namespace grt {

/// Admissible lambda range at construction; keeps the covariance divisors bounded.
inline constexpr double kLambdaMargin = 1e-6;

class SubjectParams {
 public:
  /// Throws DomainError unless kappa > 0 and lambda in [1e-6, 1 - 1e-6];
  /// DegenerateAngleError if the two bounds are parallel.
  SubjectParams(double kappa, double lambda, LinearBound bound_x, LinearBound bound_y);

  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  const LinearBound& bound_x() const { return bound_x_; }
  const LinearBound& bound_y() const { return bound_y_; }

  bool operator==(const SubjectParams&) const = default;

 private:
  double kappa_;
  double lambda_;
  LinearBound bound_x_;
  LinearBound bound_y_;
};

class GrtWindModel {
 public:
  /// At least one subject. When the constraints fix a mean at the origin or a
  /// distribution's variances at one, the referenced group distribution must
  /// satisfy that exactly (InvariantError otherwise).
  GrtWindModel(std::array<PerceptualDistribution, 4> group_distributions,
               std::vector<SubjectParams> subjects, ConstraintScheme constraints = {});

  std::span<const PerceptualDistribution, 4> group_distributions() const { return group_; }
  std::span<const SubjectParams> subjects() const { return subjects_; }
  std::size_t subject_count() const { return subjects_.size(); }
  const SubjectParams& subject(std::size_t index) const;
  const ConstraintScheme& constraints() const { return constraints_; }

  bool operator==(const GrtWindModel&) const = default;

 private:
  std::array<PerceptualDistribution, 4> group_;
  std::vector<SubjectParams> subjects_;
  ConstraintScheme constraints_;
};

/// Subject covariance from a group covariance:
///   [[sxx/(k*l), sxy/(k*sqrt(l(1-l)))], [., syy/(k(1-l))]]
/// Throws DomainError unless kappa > 0 and 0 < lambda < 1.
Covariance subject_covariance(const Covariance& group, double kappa, double lambda);

/// The 2x2 model seen by one subject: group means, scaled covariances, subject bounds.
/// Throws InvariantError when the index is out of range.
TwoByTwoModel subject_model(const GrtWindModel& model, std::size_t subject);

// Element-wise forms of the subject-specific rotation and shear. These are the
// shipped path of subject_specific_induce_ds; tests cross-check them against
// generic matrix products.

/// Theta = R Sigma R^T for R = [[cos, -sin], [sin, cos]].
Covariance rotated_covariance_expanded(const Covariance& sigma, double cos_phi, double sin_phi);

/// Psi = S Theta S^T for S = [[1, -cot_omega], [0, 1]].
/// (Psi)11 = Theta11 - 2 Theta12 cot + Theta22 cot^2. A commonly quoted form puts
/// (1 + tan w)/tan w on Theta12; that agrees with the conjugation only at tan w = 1.
Covariance sheared_covariance_expanded(const Covariance& theta, double cot_omega);

/// nu = S R mu, written out element-wise. The first component is
///   mu_x cos - mu_y sin - (mu_x sin + mu_y cos) cot.
Vec2 rotated_sheared_mean_expanded(const Vec2& mean, double cos_phi, double sin_phi,
                                   double cot_omega);

struct SubjectSpecificDs {
  std::vector<TwoByTwoModel> models;        // one DS model per subject
  std::vector<AffineTransform> transforms;  // subject-specific transforms, same order
};

/// Applies each subject's own rotation/shear (anchored at that subject's bound
/// intersection). Every output model satisfies DS; per-subject response
/// probabilities are preserved. Throws DegenerateAngleError naming the subject
/// whose bounds are parallel.
SubjectSpecificDs subject_specific_induce_ds(const GrtWindModel& model);

/// Serial reference for subject_specific_induce_ds (the default runs subjects in parallel).
SubjectSpecificDs subject_specific_induce_ds_serial(const GrtWindModel& model);

/// True when, for some stimulus, the subject models disagree on the mean vector
/// (relative tolerance 1e-9): the image no longer shares one perceptual configuration.
bool universal_perception_violated(std::span<const TwoByTwoModel> subject_models);

}  // namespace grt
