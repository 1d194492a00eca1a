#pragma once

// Bivariate normal integration and predicted response probabilities.

#include <cstddef>
#include <limits>

#include "grt/model.hpp"

namespace grt {

/// A real number or one of +-infinity, spelled out so that open interval ends
/// are never encoded as large sentinel values.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v);
  static ExtendedReal neg_infinity() { return ExtendedReal(Kind::NegInf, 0.0); }
  static ExtendedReal pos_infinity() { return ExtendedReal(Kind::PosInf, 0.0); }

  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_neg_infinity() const { return kind_ == Kind::NegInf; }
  bool is_pos_infinity() const { return kind_ == Kind::PosInf; }

  /// The IEEE value (+-inf for the infinite cases).
  double value() const;

  bool operator<(const ExtendedReal& other) const;
  bool operator==(const ExtendedReal&) const = default;

 private:
  enum class Kind { NegInf, Finite, PosInf };
  ExtendedReal(Kind kind, double v) : kind_(kind), v_(v) {}
  Kind kind_;
  double v_;
};

struct Interval {
  ExtendedReal lower = ExtendedReal::neg_infinity();
  ExtendedReal upper = ExtendedReal::pos_infinity();
};

/// Axis-aligned rectangle in the (decisionally separable) perceptual frame.
class ResponseRegion {
 public:
  /// Throws InvariantError unless lower < upper on both axes.
  ResponseRegion(Interval x, Interval y);

  const Interval& x() const { return x_; }
  const Interval& y() const { return y_; }

 private:
  Interval x_;
  Interval y_;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.
/// Drezner-Wesolowsky Gauss-Legendre scheme with the double-precision refinements
/// of Genz; absolute error well below 1e-12. h and k may be +-infinity.
/// Throws DomainError when |rho| >= 1 or any argument is NaN.
double bvn_cdf(double h, double k, double rho);

/// Probability mass of `dist` over an axis-aligned rectangle (standardize, then
/// four-term inclusion-exclusion). Clamped to [0, 1].
double rectangle_probability(const PerceptualDistribution& dist, const ResponseRegion& region);

/// How regions bounded by tilted lines are integrated.
enum class IntegrationRoute {
  /// induce_ds first, then axis-aligned rectangles (the default).
  TransformThenRectangle,
  /// Map each percept to half-plane coordinates u = x - b_x y, v = y - b_y x, in
  /// which every region is a rectangle of intercepts. Independent of the
  /// rotation/shear path; used to certify equivalence twins.
  ObliqueCoordinates,
};

/// Stimulus-by-response probabilities (row-major stimulus and response order).
/// Rows sum to one.
ProbabilityMatrix response_probabilities(
    const TwoByTwoModel& model, IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
ProbabilityMatrix response_probabilities(
    const MultiBoundModel& model, IntegrationRoute route = IntegrationRoute::TransformThenRectangle);
ProbabilityMatrix response_probabilities(
    const SingleSubjectModel& model,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);

/// 4x4 matrix for one GRTwIND subject (delegates to that subject's 2x2 model).
ProbabilityMatrix grtwind_response_probabilities(
    const GrtWindModel& model, std::size_t subject,
    IntegrationRoute route = IntegrationRoute::TransformThenRectangle);

/// Largest absolute entry-wise difference; throws ShapeError on shape mismatch.
double max_abs_difference(const ProbabilityMatrix& a, const ProbabilityMatrix& b);

}  // namespace grt
