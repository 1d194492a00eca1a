#include "grt/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "grt/errors.hpp"

namespace grt {

Mat2 Covariance::matrix() const {
  Mat2 m;
  m << xx, xy, xy, yy;
  return m;
}

double Covariance::correlation() const { return xy / std::sqrt(xx * yy); }

Covariance Covariance::from_matrix(const Mat2& m) {
  return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
}

Covariance Covariance::from_correlation(double sd_x, double sd_y, double rho) {
  return {sd_x * sd_x, rho * sd_x * sd_y, sd_y * sd_y};
}

PerceptualDistribution::PerceptualDistribution(Vec2 mean, Covariance covariance)
    : mean_(std::move(mean)), covariance_(covariance) {
  if (!std::isfinite(mean_.x()) || !std::isfinite(mean_.y())) {
    throw InvariantError("perceptual distribution mean must be finite");
  }
  const auto& c = covariance_;
  if (!std::isfinite(c.xx) || !std::isfinite(c.xy) || !std::isfinite(c.yy)) {
    throw InvariantError("perceptual distribution covariance must be finite");
  }
  if (!(c.xx > 0.0) || !(c.yy > 0.0) || !(c.determinant() > 0.0) ||
      !(std::abs(c.correlation()) < 1.0)) {
    std::ostringstream msg;
    msg << "covariance [" << c.xx << ", " << c.xy << ", " << c.yy << "] is not positive definite";
    throw InvariantError(msg.str());
  }
}

bool PerceptualDistribution::operator==(const PerceptualDistribution& other) const {
  return mean_ == other.mean_ && covariance_ == other.covariance_;
}

LinearBound::LinearBound(BoundOrientation orientation, double intercept, double slope)
    : orientation_(orientation), intercept_(intercept), slope_(slope) {
  if (!std::isfinite(intercept_)) throw InvariantError("bound intercept must be finite");
  if (!std::isfinite(slope_)) throw InvariantError("bound slope must be finite");
}

double LinearBound::side(const Vec2& p) const {
  return orientation_ == BoundOrientation::XBound ? p.x() - (intercept_ + slope_ * p.y())
                                                  : p.y() - (intercept_ + slope_ * p.x());
}

Vec2 LinearBound::direction() const {
  return orientation_ == BoundOrientation::XBound ? Vec2(slope_, 1.0) : Vec2(1.0, slope_);
}

bool bounds_parallel(const LinearBound& a, const LinearBound& b) {
  const Vec2 da = a.direction();
  const Vec2 db = b.direction();
  return da.x() * db.y() - da.y() * db.x() == 0.0;
}

Vec2 bound_intersection(const LinearBound& x_bound, const LinearBound& y_bound) {
  if (x_bound.orientation() != BoundOrientation::XBound ||
      y_bound.orientation() != BoundOrientation::YBound) {
    throw InvariantError("bound_intersection expects an XBound and a YBound");
  }
  const double det = 1.0 - x_bound.slope() * y_bound.slope();
  if (det == 0.0) throw DegenerateAngleError("x-bound and y-bound are parallel");
  const double x = (x_bound.intercept() + x_bound.slope() * y_bound.intercept()) / det;
  const double y = y_bound.intercept() + y_bound.slope() * x;
  return {x, y};
}

bool ConstraintScheme::complete() const {
  return location_fix.kind != LocationFix::Kind::None && scale_fix.kind != ScaleFix::Kind::None &&
         orthogonality_fix != OrthogonalityFix::None;
}

namespace {

void require_orientation(const LinearBound& b, BoundOrientation expected, const char* what) {
  if (b.orientation() != expected) {
    throw InvariantError(std::string(what) + " has the wrong orientation");
  }
}

void require_scheme_indices(const ConstraintScheme& scheme, std::size_t stimuli) {
  if (scheme.location_fix.kind == LocationFix::Kind::MeanAtOrigin &&
      scheme.location_fix.stimulus >= stimuli) {
    throw InvariantError("location fix refers to a stimulus index out of range");
  }
  if (scheme.scale_fix.kind == ScaleFix::Kind::UnitVariancesOneDistribution &&
      scheme.scale_fix.stimulus >= stimuli) {
    throw InvariantError("scale fix refers to a stimulus index out of range");
  }
}

}  // namespace

TwoByTwoModel::TwoByTwoModel(std::array<PerceptualDistribution, 4> distributions,
                             LinearBound bound_x, LinearBound bound_y,
                             ConstraintScheme constraints)
    : distributions_(std::move(distributions)),
      bound_x_(bound_x),
      bound_y_(bound_y),
      constraints_(constraints) {
  require_orientation(bound_x_, BoundOrientation::XBound, "bound_x");
  require_orientation(bound_y_, BoundOrientation::YBound, "bound_y");
  if (bounds_parallel(bound_x_, bound_y_)) {
    throw DegenerateAngleError("bound_x and bound_y are parallel (shear angle is 0 mod pi)");
  }
  require_scheme_indices(constraints_, kStimuli);
}

const PerceptualDistribution& TwoByTwoModel::distribution(std::size_t x_level,
                                                          std::size_t y_level) const {
  if (x_level > 1 || y_level > 1) throw InvariantError("2x2 stimulus level out of range");
  return distributions_[x_level * 2 + y_level];
}

TwoByTwoModel TwoByTwoModel::with_constraints(ConstraintScheme constraints) const {
  return {distributions_, bound_x_, bound_y_, constraints};
}

namespace {

void validate_family(std::span<const LinearBound> family, BoundOrientation orientation,
                     const char* name) {
  if (family.empty()) throw InvariantError(std::string(name) + " must not be empty");
  for (const auto& b : family) require_orientation(b, orientation, name);
  for (std::size_t k = 1; k < family.size(); ++k) {
    if (family[k].slope() != family[0].slope()) {
      throw UnsupportedModelError(std::string("non-parallel same-dimension bounds in ") + name +
                                  ": intersecting bounds produce uninterpretable response regions");
    }
    if (!(family[k].intercept() > family[k - 1].intercept())) {
      throw InvariantError(std::string(name) + " must be strictly ordered by intercept");
    }
  }
}

}  // namespace

MultiBoundModel::MultiBoundModel(MultiBoundKind kind, std::size_t stimulus_x_levels,
                                 std::size_t stimulus_y_levels,
                                 std::vector<PerceptualDistribution> distributions,
                                 std::vector<LinearBound> bounds_x,
                                 std::vector<LinearBound> bounds_y, ConstraintScheme constraints)
    : kind_(kind),
      stimulus_x_levels_(stimulus_x_levels),
      stimulus_y_levels_(stimulus_y_levels),
      distributions_(std::move(distributions)),
      bounds_x_(std::move(bounds_x)),
      bounds_y_(std::move(bounds_y)),
      constraints_(constraints) {
  validate_family(bounds_x_, BoundOrientation::XBound, "bounds_x");
  validate_family(bounds_y_, BoundOrientation::YBound, "bounds_y");
  if (bounds_x_.size() < 2 || bounds_y_.size() < 2) {
    throw InvariantError("multi-bound models need at least two bounds on each dimension");
  }
  if (bounds_parallel(bounds_x_.front(), bounds_y_.front())) {
    throw DegenerateAngleError("x-bound family is parallel to the y-bound family");
  }
  if (distributions_.size() != stimulus_x_levels_ * stimulus_y_levels_) {
    throw InvariantError("distribution count does not match the stimulus grid");
  }
  switch (kind_) {
    case MultiBoundKind::ConcurrentRatings:
      if (stimulus_x_levels_ != 2 || stimulus_y_levels_ != 2) {
        throw InvariantError("concurrent-ratings models have a 2x2 stimulus grid");
      }
      break;
    case MultiBoundKind::NxMIdentification:
      if (stimulus_x_levels_ != response_x_levels() || stimulus_y_levels_ != response_y_levels()) {
        throw InvariantError("n x m identification needs one distribution per response region");
      }
      break;
  }
  require_scheme_indices(constraints_, distributions_.size());
}

const PerceptualDistribution& MultiBoundModel::distribution(std::size_t x_level,
                                                            std::size_t y_level) const {
  if (x_level >= stimulus_x_levels_ || y_level >= stimulus_y_levels_) {
    throw InvariantError("stimulus level out of range");
  }
  return distributions_[x_level * stimulus_y_levels_ + y_level];
}

MultiBoundModel MultiBoundModel::with_constraints(ConstraintScheme constraints) const {
  return {kind_,     stimulus_x_levels_, stimulus_y_levels_, distributions_,
          bounds_x_, bounds_y_,          constraints};
}

ConfusionMatrix::ConfusionMatrix(std::size_t stimuli, std::size_t responses,
                                 std::vector<std::uint64_t> counts,
                                 std::vector<std::string> stimulus_labels,
                                 std::vector<std::string> response_labels)
    : stimuli_(stimuli),
      responses_(responses),
      counts_(std::move(counts)),
      stimulus_labels_(std::move(stimulus_labels)),
      response_labels_(std::move(response_labels)) {
  if (stimuli_ == 0 || responses_ == 0) throw InvariantError("confusion matrix must be non-empty");
  if (counts_.size() != stimuli_ * responses_) {
    throw InvariantError("confusion matrix count vector has the wrong size");
  }
  if (stimulus_labels_.empty()) {
    for (std::size_t s = 0; s < stimuli_; ++s) stimulus_labels_.push_back("S" + std::to_string(s + 1));
  }
  if (response_labels_.empty()) {
    for (std::size_t r = 0; r < responses_; ++r) response_labels_.push_back("R" + std::to_string(r + 1));
  }
  if (stimulus_labels_.size() != stimuli_ || response_labels_.size() != responses_) {
    throw InvariantError("confusion matrix label count does not match its dimensions");
  }
  for (std::size_t s = 0; s < stimuli_; ++s) {
    if (row_total(s) == 0) {
      throw InvariantError("stimulus '" + stimulus_labels_[s] + "' has no trials");
    }
  }
}

std::uint64_t ConfusionMatrix::row_total(std::size_t s) const {
  const auto row = counts().subspan(s * responses_, responses_);
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::string stimulus_label(std::size_t x_level, std::size_t y_level) {
  return "A" + std::to_string(x_level + 1) + "B" + std::to_string(y_level + 1);
}

std::string response_label(std::size_t x_level, std::size_t y_level) {
  return "a" + std::to_string(x_level + 1) + "b" + std::to_string(y_level + 1);
}

std::vector<std::string> grid_labels(std::size_t x_levels, std::size_t y_levels, bool stimulus) {
  std::vector<std::string> out;
  out.reserve(x_levels * y_levels);
  for (std::size_t i = 0; i < x_levels; ++i) {
    for (std::size_t j = 0; j < y_levels; ++j) {
      out.push_back(stimulus ? stimulus_label(i, j) : response_label(i, j));
    }
  }
  return out;
}

namespace {

std::vector<bool> pi_flags(std::span<const PerceptualDistribution> dists) {
  std::vector<bool> out;
  out.reserve(dists.size());
  for (const auto& d : dists) out.push_back(std::abs(d.correlation()) <= kPredicateTolerance);
  return out;
}

// Marginal on `dim` must not change across the other dimension's levels.
bool ps_on_grid(std::span<const PerceptualDistribution> dists, std::size_t x_levels,
                std::size_t y_levels, Dimension dim) {
  const auto at = [&](std::size_t i, std::size_t j) -> const PerceptualDistribution& {
    return dists[i * y_levels + j];
  };
  const std::size_t levels = dim == Dimension::X ? x_levels : y_levels;
  const std::size_t others = dim == Dimension::X ? y_levels : x_levels;
  for (std::size_t level = 0; level < levels; ++level) {
    const auto& ref = dim == Dimension::X ? at(level, 0) : at(0, level);
    const double ref_mean = dim == Dimension::X ? ref.mean().x() : ref.mean().y();
    const double ref_var = dim == Dimension::X ? ref.covariance().xx : ref.covariance().yy;
    for (std::size_t other = 1; other < others; ++other) {
      const auto& d = dim == Dimension::X ? at(level, other) : at(other, level);
      const double mean = dim == Dimension::X ? d.mean().x() : d.mean().y();
      const double var = dim == Dimension::X ? d.covariance().xx : d.covariance().yy;
      const double pooled_sd = std::sqrt(0.5 * (ref_var + var));
      if (std::abs(mean - ref_mean) / pooled_sd > kPredicateTolerance) return false;
      if (std::abs(var - ref_var) / (0.5 * (ref_var + var)) > kPredicateTolerance) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<bool> check_pi(const TwoByTwoModel& model) { return pi_flags(model.distributions()); }
std::vector<bool> check_pi(const MultiBoundModel& model) { return pi_flags(model.distributions()); }

bool check_ps(const TwoByTwoModel& model, Dimension dimension) {
  return ps_on_grid(model.distributions(), 2, 2, dimension);
}

bool check_ps(const MultiBoundModel& model, Dimension dimension) {
  return ps_on_grid(model.distributions(), model.stimulus_x_levels(), model.stimulus_y_levels(),
                    dimension);
}

DsResult check_ds(const TwoByTwoModel& model) {
  return {model.bound_x().axis_aligned(), model.bound_y().axis_aligned()};
}

DsResult check_ds(const MultiBoundModel& model) {
  const auto aligned = [](std::span<const LinearBound> family) {
    return std::all_of(family.begin(), family.end(),
                       [](const LinearBound& b) { return b.axis_aligned(); });
  };
  return {aligned(model.bounds_x()), aligned(model.bounds_y())};
}

}  // namespace grt
