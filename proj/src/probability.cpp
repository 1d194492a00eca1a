#include "grt/probability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "grt/errors.hpp"
#include "grt/transforms.hpp"

namespace grt {

ExtendedReal ExtendedReal::finite(double v) {
  if (!std::isfinite(v)) throw DomainError("ExtendedReal::finite requires a finite value");
  return {Kind::Finite, v};
}

double ExtendedReal::value() const {
  switch (kind_) {
    case Kind::NegInf:
      return -std::numeric_limits<double>::infinity();
    case Kind::PosInf:
      return std::numeric_limits<double>::infinity();
    case Kind::Finite:
      break;
  }
  return v_;
}

bool ExtendedReal::operator<(const ExtendedReal& other) const {
  if (kind_ != other.kind_) return static_cast<int>(kind_) < static_cast<int>(other.kind_);
  return kind_ == Kind::Finite && v_ < other.v_;
}

ResponseRegion::ResponseRegion(Interval x, Interval y) : x_(x), y_(y) {
  if (!(x_.lower < x_.upper) || !(y_.lower < y_.upper)) {
    throw InvariantError("response region needs lower < upper on both axes");
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Gauss-Legendre half-rules (6, 12 and 20 points) on [-1, 1].
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> kX6 = {-0.9324695142031522, -0.6612093864662647,
                                       -0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {-0.9815606342467191, -0.9041172563704750,
                                        -0.7699026741943050, -0.5873179542866171,
                                        -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
    -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
    -0.2277858511416451, -0.07652652113349733};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// P(X > h, Y > k), finite h and k.
double bvn_upper(double h, double k, double r) {
  std::span<const double> w;
  std::span<const double> x;
  if (std::abs(r) < 0.3) {
    w = kW6;
    x = kX6;
  } else if (std::abs(r) < 0.75) {
    w = kW12;
    x = kX12;
  } else {
    w = kW20;
    x = kX20;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < w.size(); ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + normal_cdf(-h) * normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  const double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 16.0;
  bvn = a * std::exp(-(bs / as + hk) / 2.0) *
        (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
  if (hk > -160.0) {
    const double b = std::sqrt(bs);
    bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
           (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  a /= 2.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double xs = a * (x[i] + 1.0);
    xs *= xs;
    double rs = std::sqrt(1.0 - xs);
    bvn += a * w[i] *
           (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
            std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
    xs = as * (1.0 - x[i]) * (1.0 - x[i]) / 4.0;
    rs = std::sqrt(1.0 - xs);
    bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
           (std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs -
            (1.0 + c * xs * (1.0 + d * xs)));
  }
  bvn = -bvn / kTwoPi;

  if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) {
    bvn += h < 0.0 ? normal_cdf(k) - normal_cdf(h) : normal_cdf(-h) - normal_cdf(-k);
  }
  return bvn;
}

}  // namespace

double bvn_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(rho)) {
    throw DomainError("bvn_cdf arguments must not be NaN");
  }
  if (!(std::abs(rho) < 1.0)) throw DomainError("bvn_cdf requires |rho| < 1");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h == -inf || k == -inf) return 0.0;
  if (h == inf) return normal_cdf(k);
  if (k == inf) return normal_cdf(h);
  return std::clamp(bvn_upper(-h, -k, rho), 0.0, 1.0);
}

namespace {

// Probabilities of every cell of the grid cut by x_cuts and y_cuts (both sorted,
// finite), one row per distribution. Each CDF corner is evaluated once.
ProbabilityMatrix grid_probabilities(std::span<const PerceptualDistribution> dists,
                                     std::span<const double> x_cuts,
                                     std::span<const double> y_cuts) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t nx = x_cuts.size() + 1;
  const std::size_t ny = y_cuts.size() + 1;
  ProbabilityMatrix out(static_cast<Eigen::Index>(dists.size()),
                        static_cast<Eigen::Index>(nx * ny));
  std::vector<double> zx(nx + 1), zy(ny + 1), cdf((nx + 1) * (ny + 1));
  for (std::size_t s = 0; s < dists.size(); ++s) {
    const auto& d = dists[s];
    const double sx = std::sqrt(d.covariance().xx);
    const double sy = std::sqrt(d.covariance().yy);
    const double rho = d.correlation();
    zx.front() = -inf;
    zx.back() = inf;
    zy.front() = -inf;
    zy.back() = inf;
    for (std::size_t i = 0; i < x_cuts.size(); ++i) zx[i + 1] = (x_cuts[i] - d.mean().x()) / sx;
    for (std::size_t j = 0; j < y_cuts.size(); ++j) zy[j + 1] = (y_cuts[j] - d.mean().y()) / sy;
    for (std::size_t i = 0; i <= nx; ++i) {
      for (std::size_t j = 0; j <= ny; ++j) cdf[i * (ny + 1) + j] = bvn_cdf(zx[i], zy[j], rho);
    }
    const auto F = [&](std::size_t i, std::size_t j) { return cdf[i * (ny + 1) + j]; };
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const double p = F(i + 1, j + 1) - F(i, j + 1) - F(i + 1, j) + F(i, j);
        out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i * ny + j)) =
            std::clamp(p, 0.0, 1.0);
      }
    }
  }
  return out;
}

std::vector<double> intercepts(std::span<const LinearBound> family) {
  std::vector<double> out;
  out.reserve(family.size());
  for (const auto& b : family) out.push_back(b.intercept());
  return out;
}

// Percepts in half-plane coordinates (u, v) = (x - b_x y, y - b_y x).
std::vector<PerceptualDistribution> oblique(std::span<const PerceptualDistribution> dists,
                                            double slope_x, double slope_y) {
  Mat2 l;
  l << 1.0, -slope_x, -slope_y, 1.0;
  std::vector<PerceptualDistribution> out;
  out.reserve(dists.size());
  for (const auto& d : dists) {
    out.emplace_back(l * d.mean(),
                     Covariance::from_matrix(l * d.covariance().matrix() * l.transpose()));
  }
  return out;
}

ProbabilityMatrix single_model_probabilities(std::span<const PerceptualDistribution> dists,
                                             std::span<const LinearBound> bx,
                                             std::span<const LinearBound> by) {
  const auto cx = intercepts(bx);
  const auto cy = intercepts(by);
  const double slope_x = bx.front().slope();
  const double slope_y = by.front().slope();
  if (slope_x == 0.0 && slope_y == 0.0) return grid_probabilities(dists, cx, cy);
  const auto mapped = oblique(dists, slope_x, slope_y);
  return grid_probabilities(mapped, cx, cy);
}

}  // namespace

double rectangle_probability(const PerceptualDistribution& dist, const ResponseRegion& region) {
  const double sx = std::sqrt(dist.covariance().xx);
  const double sy = std::sqrt(dist.covariance().yy);
  const double rho = dist.correlation();
  const double xl = (region.x().lower.value() - dist.mean().x()) / sx;
  const double xu = (region.x().upper.value() - dist.mean().x()) / sx;
  const double yl = (region.y().lower.value() - dist.mean().y()) / sy;
  const double yu = (region.y().upper.value() - dist.mean().y()) / sy;
  const double p =
      bvn_cdf(xu, yu, rho) - bvn_cdf(xl, yu, rho) - bvn_cdf(xu, yl, rho) + bvn_cdf(xl, yl, rho);
  return std::clamp(p, 0.0, 1.0);
}

ProbabilityMatrix response_probabilities(const TwoByTwoModel& model, IntegrationRoute route) {
  const std::array<LinearBound, 1> bx{model.bound_x()};
  const std::array<LinearBound, 1> by{model.bound_y()};
  if (check_ds(model).both() || route == IntegrationRoute::ObliqueCoordinates) {
    return single_model_probabilities(model.distributions(), bx, by);
  }
  const auto ds = induce_ds(model).model;
  const std::array<LinearBound, 1> dbx{ds.bound_x()};
  const std::array<LinearBound, 1> dby{ds.bound_y()};
  return single_model_probabilities(ds.distributions(), dbx, dby);
}

ProbabilityMatrix response_probabilities(const MultiBoundModel& model, IntegrationRoute route) {
  if (check_ds(model).both() || route == IntegrationRoute::ObliqueCoordinates) {
    return single_model_probabilities(model.distributions(), model.bounds_x(), model.bounds_y());
  }
  const auto ds = induce_ds(model).model;
  return single_model_probabilities(ds.distributions(), ds.bounds_x(), ds.bounds_y());
}

ProbabilityMatrix response_probabilities(const SingleSubjectModel& model, IntegrationRoute route) {
  return std::visit([route](const auto& m) { return response_probabilities(m, route); }, model);
}

ProbabilityMatrix grtwind_response_probabilities(const GrtWindModel& model, std::size_t subject,
                                                 IntegrationRoute route) {
  return response_probabilities(subject_model(model, subject), route);
}

double max_abs_difference(const ProbabilityMatrix& a, const ProbabilityMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("probability matrices differ in shape");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace grt
