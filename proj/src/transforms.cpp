#include "grt/transforms.hpp"

#include <cmath>

#include "grt/errors.hpp"

namespace grt {

AffineTransform::AffineTransform(Mat2 linear, Vec2 offset, Provenance provenance)
    : linear_(std::move(linear)), offset_(std::move(offset)), provenance_(std::move(provenance)) {
  if (!linear_.allFinite() || !offset_.allFinite()) {
    throw DomainError("affine transform entries must be finite");
  }
  if (!(std::abs(linear_.determinant()) > 1e-12)) {
    throw DomainError("affine transform is not invertible (|det| <= 1e-12)");
  }
}

AffineTransform AffineTransform::identity() {
  return {Mat2::Identity(), Vec2::Zero(), provenance::Identity{}};
}

Vec2 AffineTransform::apply(const Vec2& point) const { return linear_ * point + offset_; }

Covariance AffineTransform::apply(const Covariance& covariance) const {
  return Covariance::from_matrix(linear_ * covariance.matrix() * linear_.transpose());
}

PerceptualDistribution AffineTransform::apply(const PerceptualDistribution& dist) const {
  return {apply(dist.mean()), apply(dist.covariance())};
}

AffineTransform AffineTransform::inverse() const {
  const Mat2 inv = linear_.inverse();
  return {inv, -(inv * offset_), provenance::Inverse{{*this}}};
}

AffineTransform AffineTransform::then(const AffineTransform& next) const {
  return {next.linear_ * linear_, next.linear_ * offset_ + next.offset_,
          provenance::Composite{{*this, next}}};
}

bool AffineTransform::is_identity() const {
  return linear_ == Mat2::Identity() && offset_ == Vec2::Zero();
}

AffineTransform rotation(double phi) {
  if (!std::isfinite(phi)) throw DomainError("rotation angle must be finite");
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat2 m;
  m << c, -s, s, c;
  return {m, Vec2::Zero(), provenance::Rotation{phi}};
}

AffineTransform shear(double omega) {
  if (!std::isfinite(omega)) throw DomainError("shear angle must be finite");
  const double s = std::sin(omega);
  if (std::abs(s) <= 1e-12) {
    throw DegenerateAngleError("shear angle is a multiple of pi: the bounds are parallel");
  }
  Mat2 m;
  m << 1.0, -std::cos(omega) / s, 0.0, 1.0;
  return {m, Vec2::Zero(), provenance::Shear{omega}};
}

AffineTransform translation(const Vec2& shift) {
  return {Mat2::Identity(), shift, provenance::Translation{shift}};
}

AffineTransform reflection_x() {
  Mat2 m;
  m << -1.0, 0.0, 0.0, 1.0;
  return {m, Vec2::Zero(), provenance::Reflection{}};
}

Mat2 BoundGeometry::rotation_matrix() const {
  Mat2 r;
  r << cos_phi, -sin_phi, sin_phi, cos_phi;
  return r;
}

Mat2 BoundGeometry::shear_matrix() const {
  Mat2 s;
  s << 1.0, -cot_omega, 0.0, 1.0;
  return s;
}

Mat2 BoundGeometry::linear() const {
  Mat2 m = shear_matrix() * rotation_matrix();
  if (reflected) m.row(0) = -m.row(0);
  return m;
}

AffineTransform BoundGeometry::transform() const {
  const Mat2 m = linear();
  std::vector<AffineTransform> parts{translation(-pivot), rotation(phi), shear(omega)};
  if (reflected) parts.push_back(reflection_x());
  parts.push_back(translation(pivot));
  return {m, pivot - m * pivot, provenance::Composite{std::move(parts)}};
}

BoundGeometry bound_geometry(const LinearBound& bound_x, const LinearBound& bound_y) {
  BoundGeometry g;
  g.pivot = bound_intersection(bound_x, bound_y);

  const double by = bound_y.slope();
  const double r = std::hypot(1.0, by);
  g.phi = -std::atan(by);
  g.cos_phi = 1.0 / r;
  g.sin_phi = -by / r;

  // Rotated x-bound direction.
  double dx = g.cos_phi * bound_x.slope() - g.sin_phi;
  double dy = g.sin_phi * bound_x.slope() + g.cos_phi;
  if (dy == 0.0) throw DegenerateAngleError("x-bound and y-bound are parallel");
  if (dy < 0.0) {
    g.reflected = true;
    dx = -dx;
    dy = -dy;
  }
  g.cot_omega = dx / dy;
  g.omega = std::atan2(dy, dx);
  return g;
}

Transformed<TwoByTwoModel> induce_ds(const TwoByTwoModel& model) {
  const BoundGeometry g = bound_geometry(model.bound_x(), model.bound_y());
  const AffineTransform t = g.transform();

  const auto src = model.distributions();
  std::array<PerceptualDistribution, 4> out{t.apply(src[0]), t.apply(src[1]), t.apply(src[2]),
                                            t.apply(src[3])};
  const Vec2 q = t.apply(g.pivot);
  return {TwoByTwoModel(out, LinearBound::x_bound(q.x()), LinearBound::y_bound(q.y()),
                        model.constraints()),
          t};
}

Transformed<MultiBoundModel> induce_ds(const MultiBoundModel& model) {
  const auto bx = model.bounds_x();
  const auto by = model.bounds_y();
  const BoundGeometry g = bound_geometry(bx.front(), by.front());
  const AffineTransform t = g.transform();

  std::vector<PerceptualDistribution> dists;
  dists.reserve(model.stimulus_count());
  for (const auto& d : model.distributions()) dists.push_back(t.apply(d));

  // Each image bound is vertical/horizontal, so one mapped point fixes it.
  std::vector<LinearBound> new_x;
  for (const auto& b : bx) {
    new_x.push_back(LinearBound::x_bound(t.apply(bound_intersection(b, by.front())).x()));
  }
  std::vector<LinearBound> new_y;
  for (const auto& b : by) {
    new_y.push_back(LinearBound::y_bound(t.apply(bound_intersection(bx.front(), b)).y()));
  }
  return {MultiBoundModel(model.kind(), model.stimulus_x_levels(), model.stimulus_y_levels(),
                          std::move(dists), std::move(new_x), std::move(new_y),
                          model.constraints()),
          t};
}

Transformed<PerceptualDistribution> normalize_mean_variance(const PerceptualDistribution& dist,
                                                            const Vec2& criteria) {
  if (!criteria.allFinite()) throw DomainError("response criteria must be finite");
  const Covariance& cov = dist.covariance();
  const double sx = std::sqrt(cov.xx);
  const double sy = std::sqrt(cov.yy);
  const Vec2& mu = dist.mean();

  // Unit variances leave the coordinate untouched; written out so that the
  // identity case is exact rather than c + (mu - c).
  const double eta_x = cov.xx == 1.0 ? mu.x() : criteria.x() + (mu.x() - criteria.x()) / sx;
  const double eta_y = cov.yy == 1.0 ? mu.y() : criteria.y() + (mu.y() - criteria.y()) / sy;

  const Vec2 scale(1.0 / sx, 1.0 / sy);
  const Vec2 shift(criteria.x() - criteria.x() / sx, criteria.y() - criteria.y() / sy);
  Mat2 t;
  t << scale.x(), 0.0, 0.0, scale.y();

  PerceptualDistribution out(Vec2(eta_x, eta_y), Covariance{1.0, cov.correlation(), 1.0});
  return {out, AffineTransform(t, shift, provenance::MeanVarianceNormalization{scale, shift})};
}

NormalizedModel normalize_model(const TwoByTwoModel& model) {
  if (!check_ds(model).both()) {
    throw PreconditionError(
        "normalize_model requires decisional separability; apply induce_ds first");
  }
  const Vec2 criteria(model.bound_x().intercept(), model.bound_y().intercept());
  std::vector<AffineTransform> transforms;
  std::vector<PerceptualDistribution> dists;
  for (const auto& d : model.distributions()) {
    auto r = normalize_mean_variance(d, criteria);
    dists.push_back(r.model);
    transforms.push_back(std::move(r.transform));
  }
  return {TwoByTwoModel({dists[0], dists[1], dists[2], dists[3]}, model.bound_x(),
                        model.bound_y(), model.constraints()),
          std::move(transforms)};
}

}  // namespace grt
