#pragma once

// Domain types for Gaussian GRT models: perceptual distributions, linear
// decision bounds, constraint schemes, the 2x2 and multi-bound model classes,
// confusion-matrix data, and the PI / PS / DS predicates.
//
// Indexing is row-major everywhere: a stimulus or response at x-level i and
// y-level j has flat index i * (number of y-levels) + j. For the 2x2 model this
// gives the order A1B1, A1B2, A2B1, A2B2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grt/linalg.hpp"

namespace grt {

/// Symmetric 2x2 covariance stored once: [sxx, sxy, syy].
struct Covariance {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  Mat2 matrix() const;
  double determinant() const { return xx * yy - xy * xy; }
  double correlation() const;

  /// Symmetrizes by averaging the off-diagonal pair.
  static Covariance from_matrix(const Mat2& m);
  static Covariance from_correlation(double sd_x, double sd_y, double rho);

  bool operator==(const Covariance&) const = default;
};

/// Bivariate Gaussian percept for one stimulus. Always positive definite.
class PerceptualDistribution {
 public:
  /// Throws InvariantError unless every value is finite and the covariance is PD.
  PerceptualDistribution(Vec2 mean, Covariance covariance);

  const Vec2& mean() const { return mean_; }
  const Covariance& covariance() const { return covariance_; }
  double correlation() const { return covariance_.correlation(); }

  bool operator==(const PerceptualDistribution& other) const;

 private:
  Vec2 mean_;
  Covariance covariance_;
};

enum class BoundOrientation { XBound, YBound };

enum class Dimension { X, Y };

/// A straight decision bound, parameterized relative to the axis it partitions.
///   XBound: x = intercept + slope * y
///   YBound: y = intercept + slope * x
/// slope == 0 is the axis-aligned (decisionally separable) case.
class LinearBound {
 public:
  LinearBound(BoundOrientation orientation, double intercept, double slope = 0.0);

  static LinearBound x_bound(double intercept, double slope = 0.0) {
    return {BoundOrientation::XBound, intercept, slope};
  }
  static LinearBound y_bound(double intercept, double slope = 0.0) {
    return {BoundOrientation::YBound, intercept, slope};
  }

  BoundOrientation orientation() const { return orientation_; }
  double intercept() const { return intercept_; }
  double slope() const { return slope_; }
  bool axis_aligned() const { return slope_ == 0.0; }

  /// Positive on the high-response side (x > c for an XBound, y > c for a YBound).
  double side(const Vec2& p) const;

  /// Direction vector along the line: (slope, 1) for XBound, (1, slope) for YBound.
  Vec2 direction() const;

  bool operator==(const LinearBound&) const = default;

 private:
  BoundOrientation orientation_;
  double intercept_;
  double slope_;
};

/// True when two bounds (of either orientation) are parallel.
bool bounds_parallel(const LinearBound& a, const LinearBound& b);

/// Intersection point of an XBound and a YBound. Throws DegenerateAngleError if parallel.
Vec2 bound_intersection(const LinearBound& x_bound, const LinearBound& y_bound);

struct LocationFix {
  enum class Kind { MeanAtOrigin, BoundIntersectionAtOrigin, None };
  Kind kind = Kind::None;
  std::size_t stimulus = 0;  // only meaningful for MeanAtOrigin

  static LocationFix mean_at_origin(std::size_t s) { return {Kind::MeanAtOrigin, s}; }
  static LocationFix bound_intersection_at_origin() { return {Kind::BoundIntersectionAtOrigin, 0}; }
  static LocationFix none() { return {}; }
  bool operator==(const LocationFix&) const = default;
};

struct ScaleFix {
  enum class Kind { UnitVariancesOneDistribution, UnitVariancesAll, None };
  Kind kind = Kind::None;
  std::size_t stimulus = 0;  // only meaningful for UnitVariancesOneDistribution

  static ScaleFix unit_variances_one(std::size_t s) { return {Kind::UnitVariancesOneDistribution, s}; }
  static ScaleFix unit_variances_all() { return {Kind::UnitVariancesAll, 0}; }
  static ScaleFix none() { return {}; }
  bool operator==(const ScaleFix&) const = default;
};

/// How the orthogonality of the perceptual dimensions is pinned down.
/// UniversalPerception applies to GRTwIND only: subject slopes stay free and the
/// shared perceptual structure is what fixes the frame.
enum class OrthogonalityFix { AssumeDS, FixPerceptualMeans, UniversalPerception, None };

struct ConstraintScheme {
  LocationFix location_fix;
  ScaleFix scale_fix;
  OrthogonalityFix orthogonality_fix = OrthogonalityFix::None;

  /// Location, scale and orthogonality all fixed.
  bool complete() const;

  bool operator==(const ConstraintScheme&) const = default;
};

/// Single-subject 2x2 identification model.
class TwoByTwoModel {
 public:
  static constexpr std::size_t kStimuli = 4;

  /// Distributions in row-major order (A1B1, A1B2, A2B1, A2B2).
  /// Throws InvariantError on wrong orientations, DegenerateAngleError on parallel bounds.
  TwoByTwoModel(std::array<PerceptualDistribution, 4> distributions, LinearBound bound_x,
                LinearBound bound_y, ConstraintScheme constraints = {});

  std::span<const PerceptualDistribution, 4> distributions() const { return distributions_; }
  const PerceptualDistribution& distribution(std::size_t x_level, std::size_t y_level) const;
  const LinearBound& bound_x() const { return bound_x_; }
  const LinearBound& bound_y() const { return bound_y_; }
  const ConstraintScheme& constraints() const { return constraints_; }

  TwoByTwoModel with_constraints(ConstraintScheme constraints) const;

  bool operator==(const TwoByTwoModel&) const = default;

 private:
  std::array<PerceptualDistribution, 4> distributions_;
  LinearBound bound_x_;
  LinearBound bound_y_;
  ConstraintScheme constraints_;
};

enum class MultiBoundKind { ConcurrentRatings, NxMIdentification };

/// Concurrent-ratings (2x2 stimuli, several bounds per dimension) or n x m
/// identification model (one distribution per response region).
class MultiBoundModel {
 public:
  /// `stimulus_x_levels` x `stimulus_y_levels` distributions, row-major.
  /// Throws UnsupportedModelError when same-dimension bounds are not parallel,
  /// InvariantError for unordered bounds or wrong grid sizes,
  /// DegenerateAngleError when the two bound families are parallel.
  MultiBoundModel(MultiBoundKind kind, std::size_t stimulus_x_levels, std::size_t stimulus_y_levels,
                  std::vector<PerceptualDistribution> distributions, std::vector<LinearBound> bounds_x,
                  std::vector<LinearBound> bounds_y, ConstraintScheme constraints = {});

  MultiBoundKind kind() const { return kind_; }
  std::size_t stimulus_x_levels() const { return stimulus_x_levels_; }
  std::size_t stimulus_y_levels() const { return stimulus_y_levels_; }
  std::size_t stimulus_count() const { return distributions_.size(); }
  std::size_t response_x_levels() const { return bounds_x_.size() + 1; }
  std::size_t response_y_levels() const { return bounds_y_.size() + 1; }
  std::size_t response_count() const { return response_x_levels() * response_y_levels(); }

  std::span<const PerceptualDistribution> distributions() const { return distributions_; }
  const PerceptualDistribution& distribution(std::size_t x_level, std::size_t y_level) const;
  std::span<const LinearBound> bounds_x() const { return bounds_x_; }
  std::span<const LinearBound> bounds_y() const { return bounds_y_; }
  const ConstraintScheme& constraints() const { return constraints_; }

  MultiBoundModel with_constraints(ConstraintScheme constraints) const;

  bool operator==(const MultiBoundModel&) const = default;

 private:
  MultiBoundKind kind_;
  std::size_t stimulus_x_levels_;
  std::size_t stimulus_y_levels_;
  std::vector<PerceptualDistribution> distributions_;
  std::vector<LinearBound> bounds_x_;
  std::vector<LinearBound> bounds_y_;
  ConstraintScheme constraints_;
};

/// Observed response counts, stimuli by responses.
class ConfusionMatrix {
 public:
  /// `counts` is row-major with `stimuli * responses` entries. Every row must have
  /// at least one trial; label lists must match the dimensions (empty = generated).
  ConfusionMatrix(std::size_t stimuli, std::size_t responses, std::vector<std::uint64_t> counts,
                  std::vector<std::string> stimulus_labels = {},
                  std::vector<std::string> response_labels = {});

  std::size_t stimuli() const { return stimuli_; }
  std::size_t responses() const { return responses_; }
  std::uint64_t count(std::size_t s, std::size_t r) const { return counts_[s * responses_ + r]; }
  std::uint64_t row_total(std::size_t s) const;
  std::uint64_t total() const;
  std::span<const std::uint64_t> counts() const { return counts_; }
  const std::vector<std::string>& stimulus_labels() const { return stimulus_labels_; }
  const std::vector<std::string>& response_labels() const { return response_labels_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t stimuli_;
  std::size_t responses_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::string> stimulus_labels_;
  std::vector<std::string> response_labels_;
};

/// "A{i+1}B{j+1}" / "a{i+1}b{j+1}" labels for row-major grids.
std::string stimulus_label(std::size_t x_level, std::size_t y_level);
std::string response_label(std::size_t x_level, std::size_t y_level);
std::vector<std::string> grid_labels(std::size_t x_levels, std::size_t y_levels, bool stimulus);

// Predicates. Tolerances are applied to normalized quantities (correlations and
// mean differences in pooled-sd units), so they are scale free.
inline constexpr double kPredicateTolerance = 1e-12;

/// One flag per distribution (row-major): true where perceptual independence holds.
std::vector<bool> check_pi(const TwoByTwoModel& model);
std::vector<bool> check_pi(const MultiBoundModel& model);

/// Perceptual separability of `dimension`: at every level of that dimension the
/// marginal mean and variance on it do not change across levels of the other one.
bool check_ps(const TwoByTwoModel& model, Dimension dimension);
bool check_ps(const MultiBoundModel& model, Dimension dimension);

struct DsResult {
  bool x = false;
  bool y = false;
  bool both() const { return x && y; }
};

/// Exact test: every bound on the dimension has slope == 0.
DsResult check_ds(const TwoByTwoModel& model);
DsResult check_ds(const MultiBoundModel& model);

}  // namespace grt
