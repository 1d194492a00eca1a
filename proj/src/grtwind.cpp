#include "grt/grtwind.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>

#include "grt/errors.hpp"

namespace grt {

namespace {

void require_kappa_lambda(double kappa, double lambda, double margin) {
  if (!std::isfinite(kappa) || !(kappa > 0.0)) throw DomainError("kappa must be finite and > 0");
  if (!std::isfinite(lambda) || !(lambda >= margin) || !(lambda <= 1.0 - margin)) {
    throw DomainError("lambda must lie in (0, 1)");
  }
}

}  // namespace

SubjectParams::SubjectParams(double kappa, double lambda, LinearBound bound_x,
                             LinearBound bound_y)
    : kappa_(kappa), lambda_(lambda), bound_x_(bound_x), bound_y_(bound_y) {
  require_kappa_lambda(kappa, lambda, kLambdaMargin);
  if (bound_x_.orientation() != BoundOrientation::XBound ||
      bound_y_.orientation() != BoundOrientation::YBound) {
    throw InvariantError("subject bounds need one XBound and one YBound");
  }
  if (bounds_parallel(bound_x_, bound_y_)) {
    throw DegenerateAngleError("subject bounds are parallel");
  }
}

GrtWindModel::GrtWindModel(std::array<PerceptualDistribution, 4> group_distributions,
                           std::vector<SubjectParams> subjects, ConstraintScheme constraints)
    : group_(std::move(group_distributions)),
      subjects_(std::move(subjects)),
      constraints_(constraints) {
  if (subjects_.empty()) throw InvariantError("GRTwIND model needs at least one subject");
  const auto& loc = constraints_.location_fix;
  if (loc.kind == LocationFix::Kind::MeanAtOrigin) {
    if (loc.stimulus >= 4) throw InvariantError("location fix refers to a stimulus out of range");
    if (group_[loc.stimulus].mean() != Vec2::Zero()) {
      throw InvariantError("location fix: group mean " + std::to_string(loc.stimulus) +
                           " is not at the origin");
    }
  }
  const auto& scale = constraints_.scale_fix;
  const auto unit = [](const PerceptualDistribution& d) {
    return d.covariance().xx == 1.0 && d.covariance().yy == 1.0;
  };
  if (scale.kind == ScaleFix::Kind::UnitVariancesOneDistribution) {
    if (scale.stimulus >= 4) throw InvariantError("scale fix refers to a stimulus out of range");
    if (!unit(group_[scale.stimulus])) {
      throw InvariantError("scale fix: group distribution " + std::to_string(scale.stimulus) +
                           " does not have unit variances");
    }
  } else if (scale.kind == ScaleFix::Kind::UnitVariancesAll) {
    if (!std::all_of(group_.begin(), group_.end(), unit)) {
      throw InvariantError("scale fix: not every group distribution has unit variances");
    }
  }
}

const SubjectParams& GrtWindModel::subject(std::size_t index) const {
  if (index >= subjects_.size()) throw InvariantError("subject index out of range");
  return subjects_[index];
}

Covariance subject_covariance(const Covariance& group, double kappa, double lambda) {
  require_kappa_lambda(kappa, lambda, 0.0);
  if (lambda == 0.0 || lambda == 1.0) throw DomainError("lambda must lie in (0, 1)");
  return {group.xx / (kappa * lambda), group.xy / (kappa * std::sqrt(lambda * (1.0 - lambda))),
          group.yy / (kappa * (1.0 - lambda))};
}

TwoByTwoModel subject_model(const GrtWindModel& model, std::size_t subject) {
  const SubjectParams& p = model.subject(subject);
  const auto g = model.group_distributions();
  const auto make = [&](std::size_t s) {
    return PerceptualDistribution(g[s].mean(),
                                  subject_covariance(g[s].covariance(), p.kappa(), p.lambda()));
  };
  return {{make(0), make(1), make(2), make(3)}, p.bound_x(), p.bound_y()};
}

Covariance rotated_covariance_expanded(const Covariance& sigma, double c, double s) {
  Covariance theta;
  theta.xx = c * c * sigma.xx - 2.0 * c * s * sigma.xy + s * s * sigma.yy;
  theta.xy = c * s * sigma.xx + (c * c - s * s) * sigma.xy - c * s * sigma.yy;
  theta.yy = s * s * sigma.xx + 2.0 * c * s * sigma.xy + c * c * sigma.yy;
  return theta;
}

Covariance sheared_covariance_expanded(const Covariance& theta, double cot) {
  Covariance psi;
  psi.xx = theta.xx - 2.0 * theta.xy * cot + theta.yy * cot * cot;
  psi.xy = theta.xy - theta.yy * cot;
  psi.yy = theta.yy;
  return psi;
}

Vec2 rotated_sheared_mean_expanded(const Vec2& mean, double c, double s, double cot) {
  const double x = mean.x() * c - mean.y() * s;
  const double y = mean.x() * s + mean.y() * c;
  return {x - y * cot, y};
}

namespace {

struct SubjectImage {
  TwoByTwoModel model;
  AffineTransform transform;
};

SubjectImage subject_image(const GrtWindModel& model, std::size_t k) {
  const TwoByTwoModel m = subject_model(model, k);
  BoundGeometry g;
  try {
    g = bound_geometry(m.bound_x(), m.bound_y());
  } catch (const DegenerateAngleError& e) {
    throw DegenerateAngleError("subject " + std::to_string(k) + ": " + e.what());
  }
  const Vec2& q = g.pivot;

  // Element-wise map, with the x-reflection folded in when needed.
  const auto map = [&](const Vec2& p) {
    Vec2 v = rotated_sheared_mean_expanded(p, g.cos_phi, g.sin_phi, g.cot_omega);
    if (g.reflected) v.x() = -v.x();
    return v;
  };
  const Vec2 shift = q - map(q);

  const auto src = m.distributions();
  const auto image = [&](std::size_t s) {
    Covariance psi = sheared_covariance_expanded(
        rotated_covariance_expanded(src[s].covariance(), g.cos_phi, g.sin_phi), g.cot_omega);
    if (g.reflected) psi.xy = -psi.xy;
    return PerceptualDistribution(map(src[s].mean()) + shift, psi);
  };
  return {TwoByTwoModel({image(0), image(1), image(2), image(3)},
                        LinearBound::x_bound(q.x()), LinearBound::y_bound(q.y())),
          g.transform()};
}

SubjectSpecificDs collect(std::vector<std::optional<SubjectImage>>& images) {
  SubjectSpecificDs out;
  out.models.reserve(images.size());
  out.transforms.reserve(images.size());
  for (auto& im : images) {
    out.models.push_back(std::move(im->model));
    out.transforms.push_back(std::move(im->transform));
  }
  return out;
}

}  // namespace

SubjectSpecificDs subject_specific_induce_ds(const GrtWindModel& model) {
  const auto n = static_cast<std::ptrdiff_t>(model.subject_count());
  std::vector<std::optional<SubjectImage>> images(model.subject_count());
  std::vector<std::exception_ptr> errors(model.subject_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      images[k].emplace(subject_image(model, static_cast<std::size_t>(k)));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return collect(images);
}

SubjectSpecificDs subject_specific_induce_ds_serial(const GrtWindModel& model) {
  std::vector<std::optional<SubjectImage>> images(model.subject_count());
  for (std::size_t k = 0; k < model.subject_count(); ++k) images[k].emplace(subject_image(model, k));
  return collect(images);
}

bool universal_perception_violated(std::span<const TwoByTwoModel> subject_models) {
  if (subject_models.size() < 2) return false;
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  const auto ref = subject_models.front().distributions();
  for (const auto& m : subject_models.subspan(1)) {
    const auto d = m.distributions();
    for (std::size_t s = 0; s < 4; ++s) {
      if (!close(ref[s].mean().x(), d[s].mean().x()) ||
          !close(ref[s].mean().y(), d[s].mean().y())) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace grt
