#include "parameter_layout.hpp"

#include <cmath>
#include <string>

#include "grt/errors.hpp"

namespace grt::detail {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

namespace {

double rho_of(double t) { return 2.0 * logistic(t) - 1.0; }
double rho_inv(double rho) { return logit((rho + 1.0) / 2.0); }
double lambda_of(double t) { return kLambdaMargin + (1.0 - 2.0 * kLambdaMargin) * logistic(t); }
double lambda_inv(double l) { return logit((l - kLambdaMargin) / (1.0 - 2.0 * kLambdaMargin)); }

class Reader {
 public:
  explicit Reader(const std::vector<double>& theta) : theta_(theta) {}
  double next() {
    if (pos_ >= theta_.size()) throw ShapeError("parameter vector too short");
    return theta_[pos_++];
  }
  bool done() const { return pos_ == theta_.size(); }

 private:
  const std::vector<double>& theta_;
  std::size_t pos_ = 0;
};

PerceptualDistribution read_distribution(Reader& r, const DistributionSlots& slots) {
  const double mx = slots.mean_x_free ? r.next() : 0.0;
  const double my = slots.mean_y_free ? r.next() : 0.0;
  if (slots.unit_variances) return {Vec2(mx, my), Covariance{1.0, rho_of(r.next()), 1.0}};
  const double vx = std::exp(r.next());
  const double vy = std::exp(r.next());
  const double rho = rho_of(r.next());
  return {Vec2(mx, my), Covariance{vx, rho * std::sqrt(vx * vy), vy}};
}

void write_distribution(std::vector<double>& out, const PerceptualDistribution& d,
                        const DistributionSlots& slots) {
  if (slots.mean_x_free) out.push_back(d.mean().x());
  if (slots.mean_y_free) out.push_back(d.mean().y());
  if (!slots.unit_variances) {
    out.push_back(std::log(d.covariance().xx));
    out.push_back(std::log(d.covariance().yy));
  }
  out.push_back(rho_inv(d.correlation()));
}

// Intercepts: the first value (unless pinned to 0), then log increments.
std::vector<double> read_intercepts(Reader& r, std::size_t count, bool first_fixed) {
  std::vector<double> out(count);
  out[0] = first_fixed ? 0.0 : r.next();
  for (std::size_t i = 1; i < count; ++i) out[i] = out[i - 1] + std::exp(r.next());
  return out;
}

void write_intercepts(std::vector<double>& out, std::span<const LinearBound> family,
                      bool first_fixed) {
  if (!first_fixed) out.push_back(family[0].intercept());
  for (std::size_t i = 1; i < family.size(); ++i) {
    out.push_back(std::log(family[i].intercept() - family[i - 1].intercept()));
  }
}

}  // namespace

ParameterLayout::ParameterLayout(ModelClass cls, ModelSize size, ConstraintScheme scheme)
    : cls_(cls), size_(size), scheme_(scheme) {
  switch (cls_) {
    case ModelClass::TwoByTwo:
      size_ = ModelSize{2, 2, 1};
      break;
    case ModelClass::GrtWind:
      if (size_.subjects < 1) throw DomainError("GRTwIND needs at least one subject");
      size_.x_levels = size_.y_levels = 2;
      break;
    case ModelClass::ConcurrentRatings:
    case ModelClass::NxM:
      if (size_.x_levels < 2 || size_.y_levels < 2) {
        throw DomainError("response levels must be at least 2 on each dimension");
      }
      size_.subjects = 1;
      if (cls_ == ModelClass::NxM) {
        stim_x_ = size_.x_levels;
        stim_y_ = size_.y_levels;
      }
      break;
  }

  const auto& loc = scheme_.location_fix;
  const auto& scale = scheme_.scale_fix;
  if (loc.kind == LocationFix::Kind::MeanAtOrigin && loc.stimulus >= stimuli()) {
    throw DomainError("location fix refers to stimulus " + std::to_string(loc.stimulus) +
                      ", out of range");
  }
  if (scale.kind == ScaleFix::Kind::UnitVariancesOneDistribution && scale.stimulus >= stimuli()) {
    throw DomainError("scale fix refers to stimulus " + std::to_string(scale.stimulus) +
                      ", out of range");
  }
  if (cls_ == ModelClass::GrtWind && loc.kind == LocationFix::Kind::BoundIntersectionAtOrigin) {
    throw DomainError("bound-intersection location fix is not defined for GRTwIND");
  }
  if (cls_ != ModelClass::GrtWind &&
      scheme_.orthogonality_fix == OrthogonalityFix::UniversalPerception) {
    throw DomainError("universal perception applies to GRTwIND only");
  }

  dists_.resize(stimuli());
  for (std::size_t s = 0; s < stimuli(); ++s) {
    auto& d = dists_[s];
    if (loc.kind == LocationFix::Kind::MeanAtOrigin && loc.stimulus == s) {
      d.mean_x_free = d.mean_y_free = false;
    }
    d.unit_variances = scale.kind == ScaleFix::Kind::UnitVariancesAll ||
                       (scale.kind == ScaleFix::Kind::UnitVariancesOneDistribution &&
                        scale.stimulus == s);
  }
  if (scheme_.orthogonality_fix == OrthogonalityFix::FixPerceptualMeans) {
    // A2B1 on the x-axis, A1B2 on the y-axis.
    dists_[stim_y_].mean_y_free = false;
    dists_[1].mean_x_free = false;
  }
  slopes_free_ = scheme_.orthogonality_fix != OrthogonalityFix::AssumeDS;
  first_intercepts_fixed_ = loc.kind == LocationFix::Kind::BoundIntersectionAtOrigin;
}

long ParameterLayout::perceptual() const {
  long n = 0;
  for (const auto& d : dists_) n += d.mean_x_free + d.mean_y_free + (d.unit_variances ? 1 : 3);
  return n;
}

long ParameterLayout::perceptual_conventional() const {
  if (cls_ != ModelClass::NxM) return perceptual();
  long n = 0;
  for (const auto& d : dists_) n += d.mean_x_free + d.mean_y_free + (d.unit_variances ? 1 : 5);
  return n;
}

long ParameterLayout::decisional() const {
  const long slopes = slopes_free_ ? 2 : 0;
  if (cls_ == ModelClass::GrtWind) return static_cast<long>(size_.subjects) * (2 + slopes);
  long intercepts = static_cast<long>(size_.x_levels + size_.y_levels) - 2;
  if (first_intercepts_fixed_) intercepts -= 2;
  return intercepts + slopes;
}

long ParameterLayout::scaling() const {
  return cls_ == ModelClass::GrtWind ? 2 * static_cast<long>(size_.subjects) : 0;
}

AnyModel ParameterLayout::decode(const std::vector<double>& theta) const {
  if (theta.size() != dimension()) throw ShapeError("parameter vector has the wrong length");
  Reader r(theta);
  std::vector<PerceptualDistribution> dists;
  dists.reserve(stimuli());
  for (const auto& slots : dists_) dists.push_back(read_distribution(r, slots));

  if (cls_ == ModelClass::GrtWind) {
    std::vector<SubjectParams> subjects;
    subjects.reserve(size_.subjects);
    for (std::size_t k = 0; k < size_.subjects; ++k) {
      const double kappa = std::exp(r.next());
      const double lambda = lambda_of(r.next());
      const double ax = r.next();
      const double ay = r.next();
      const double bx = slopes_free_ ? r.next() : 0.0;
      const double by = slopes_free_ ? r.next() : 0.0;
      subjects.emplace_back(kappa, lambda, LinearBound::x_bound(ax, bx),
                            LinearBound::y_bound(ay, by));
    }
    return GrtWindModel({dists[0], dists[1], dists[2], dists[3]}, std::move(subjects), scheme_);
  }

  const auto cx = read_intercepts(r, size_.x_levels - 1, first_intercepts_fixed_);
  const auto cy = read_intercepts(r, size_.y_levels - 1, first_intercepts_fixed_);
  const double bx = slopes_free_ ? r.next() : 0.0;
  const double by = slopes_free_ ? r.next() : 0.0;

  if (cls_ == ModelClass::TwoByTwo) {
    return TwoByTwoModel({dists[0], dists[1], dists[2], dists[3]}, LinearBound::x_bound(cx[0], bx),
                         LinearBound::y_bound(cy[0], by), scheme_);
  }
  std::vector<LinearBound> bounds_x;
  std::vector<LinearBound> bounds_y;
  for (double c : cx) bounds_x.push_back(LinearBound::x_bound(c, bx));
  for (double c : cy) bounds_y.push_back(LinearBound::y_bound(c, by));
  const auto kind = cls_ == ModelClass::NxM ? MultiBoundKind::NxMIdentification
                                            : MultiBoundKind::ConcurrentRatings;
  return MultiBoundModel(kind, stim_x_, stim_y_, std::move(dists), std::move(bounds_x),
                         std::move(bounds_y), scheme_);
}

std::vector<double> ParameterLayout::encode(const AnyModel& model) const {
  if (grt::model_class(model) != cls_) throw ShapeError("model class does not match the layout");
  const ModelSize ms = model_size(model);
  if (ms.x_levels != size_.x_levels || ms.y_levels != size_.y_levels ||
      (cls_ == ModelClass::GrtWind && ms.subjects != size_.subjects)) {
    throw ShapeError("model size does not match the layout");
  }
  std::vector<double> out;
  out.reserve(dimension());

  if (const auto* g = std::get_if<GrtWindModel>(&model)) {
    const auto group = g->group_distributions();
    for (std::size_t s = 0; s < 4; ++s) write_distribution(out, group[s], dists_[s]);
    for (const auto& p : g->subjects()) {
      out.push_back(std::log(p.kappa()));
      out.push_back(lambda_inv(p.lambda()));
      out.push_back(p.bound_x().intercept());
      out.push_back(p.bound_y().intercept());
      if (slopes_free_) {
        out.push_back(p.bound_x().slope());
        out.push_back(p.bound_y().slope());
      }
    }
    return out;
  }

  const auto emit = [&](std::span<const PerceptualDistribution> ds,
                        std::span<const LinearBound> bx, std::span<const LinearBound> by) {
    for (std::size_t s = 0; s < ds.size(); ++s) write_distribution(out, ds[s], dists_[s]);
    write_intercepts(out, bx, first_intercepts_fixed_);
    write_intercepts(out, by, first_intercepts_fixed_);
    if (slopes_free_) {
      out.push_back(bx[0].slope());
      out.push_back(by[0].slope());
    }
  };
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    const std::array<LinearBound, 1> bx{m->bound_x()};
    const std::array<LinearBound, 1> by{m->bound_y()};
    emit(m->distributions(), bx, by);
  } else {
    const auto& mb = std::get<MultiBoundModel>(model);
    emit(mb.distributions(), mb.bounds_x(), mb.bounds_y());
  }
  return out;
}

}  // namespace grt::detail
