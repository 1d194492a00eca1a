#pragma once

// Equivalence transformations. Each operation returns the transformed model
// together with an invertible AffineTransform that records how it was produced.

#include <variant>
#include <vector>

#include "grt/core_model.hpp"
#include "grt/linalg.hpp"

namespace grt {

class AffineTransform;

namespace provenance {

struct Identity {};
struct Rotation {
  double phi;  // argument of [[cos, -sin], [sin, cos]]
};
struct Shear {
  double omega;  // [[1, -1/tan(omega)], [0, 1]]
};
struct Reflection {};  // x -> -x
struct Translation {
  Vec2 shift;
};
struct MeanVarianceNormalization {
  Vec2 scale;  // per-dimension multiplier 1/sqrt(sigma)
  Vec2 shift;  // c - c/sqrt(sigma)
};
struct Composite {
  std::vector<AffineTransform> parts;  // applied first to last
};
struct Inverse {
  std::vector<AffineTransform> of;  // exactly one element
};

}  // namespace provenance

using Provenance =
    std::variant<provenance::Identity, provenance::Rotation, provenance::Shear,
                 provenance::Reflection, provenance::Translation,
                 provenance::MeanVarianceNormalization, provenance::Composite,
                 provenance::Inverse>;

/// p -> linear * p + offset, with a record of where it came from.
class AffineTransform {
 public:
  /// Throws DomainError if |det(linear)| <= 1e-12 or any entry is non-finite.
  AffineTransform(Mat2 linear, Vec2 offset, Provenance provenance);

  static AffineTransform identity();

  const Mat2& linear() const { return linear_; }
  const Vec2& offset() const { return offset_; }
  const Provenance& provenance() const { return provenance_; }

  Vec2 apply(const Vec2& point) const;
  Covariance apply(const Covariance& covariance) const;
  PerceptualDistribution apply(const PerceptualDistribution& dist) const;

  AffineTransform inverse() const;

  /// `next` applied after this one.
  AffineTransform then(const AffineTransform& next) const;

  /// Exactly the identity map (no tolerance).
  bool is_identity() const;

 private:
  Mat2 linear_;
  Vec2 offset_;
  Provenance provenance_;
};

AffineTransform rotation(double phi);

/// Throws DegenerateAngleError when tan(omega) == 0 (omega a multiple of pi).
AffineTransform shear(double omega);

AffineTransform translation(const Vec2& shift);
AffineTransform reflection_x();

/// Angles and matrices needed to make one x-bound / y-bound pair axis aligned.
/// Everything is derived from the slopes directly so that a DS pair gives an
/// exact identity.
struct BoundGeometry {
  double phi = 0.0;        // rotation argument, -atan(slope of the y-bound)
  double cos_phi = 1.0;
  double sin_phi = 0.0;
  double omega = 0.0;      // angle from the rotated y-bound to the rotated x-bound, in (0, pi)
  double cot_omega = 0.0;  // 1/tan(omega)
  bool reflected = false;  // x-bound pointed downward after rotation (slope_x * slope_y > 1)
  Vec2 pivot = Vec2::Zero();  // bound intersection, a fixed point of the transform

  Mat2 rotation_matrix() const;
  Mat2 shear_matrix() const;
  Mat2 linear() const;  // F * S * R
  AffineTransform transform() const;
};

/// Throws DegenerateAngleError if the bounds are parallel.
BoundGeometry bound_geometry(const LinearBound& bound_x, const LinearBound& bound_y);

template <class Model>
struct Transformed {
  Model model;
  AffineTransform transform;
};

/// Rotation + shear (+ reflection when needed) anchored at the bound intersection.
/// The result has every slope exactly 0 and the same response probabilities.
/// A DS model comes back unchanged with an identity transform.
Transformed<TwoByTwoModel> induce_ds(const TwoByTwoModel& model);

/// Multi-bound version; anchored at the intersection of the first x-bound and
/// first y-bound. Bound ordering is preserved.
Transformed<MultiBoundModel> induce_ds(const MultiBoundModel& model);

/// T + Delta: covariance becomes the correlation matrix, means move so that their
/// signed distances to the criteria (in sd units) are preserved. The criteria are
/// fixed points. Output diagonal is exactly 1 and the correlation is carried over
/// unchanged.
Transformed<PerceptualDistribution> normalize_mean_variance(const PerceptualDistribution& dist,
                                                            const Vec2& criteria);

struct NormalizedModel {
  TwoByTwoModel model;
  std::vector<AffineTransform> transforms;  // one per distribution, row-major
};

/// Requires DS (throws PreconditionError otherwise; run induce_ds first).
NormalizedModel normalize_model(const TwoByTwoModel& model);

}  // namespace grt
