#include "random_models.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace grt::testing {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec2 random_mean(Rng& rng) { return {uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0)}; }

}  // namespace

PerceptualDistribution random_distribution(Rng& rng) {
  const double vx = uniform(rng, 0.25, 4.0);
  const double vy = uniform(rng, 0.25, 4.0);
  const double rho = uniform(rng, -0.9, 0.9);
  return {random_mean(rng), Covariance::from_correlation(std::sqrt(vx), std::sqrt(vy), rho)};
}

PerceptualDistribution random_unit_distribution(Rng& rng) {
  return {random_mean(rng), Covariance::from_correlation(1.0, 1.0, uniform(rng, -0.9, 0.9))};
}

BoundPair random_tilted_bounds(Rng& rng) {
  constexpr double pi = std::numbers::pi;
  for (;;) {
    const double phi_b = uniform(rng, -pi / 3.0, pi / 3.0);
    const double omega = uniform(rng, pi / 6.0, 5.0 * pi / 6.0);
    const double by = std::tan(phi_b);
    const double bx = 1.0 / std::tan(phi_b + omega);
    if (!(std::abs(bx) <= 5.0)) continue;
    const Vec2 q(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    return {LinearBound::x_bound(q.x() - bx * q.y(), bx), LinearBound::y_bound(q.y() - by * q.x(), by)};
  }
}

TwoByTwoModel random_ds_failing_2x2(Rng& rng) {
  for (;;) {
    const auto b = random_tilted_bounds(rng);
    if (b.x.axis_aligned() && b.y.axis_aligned()) continue;
    return {{random_distribution(rng), random_distribution(rng), random_distribution(rng),
             random_distribution(rng)},
            b.x,
            b.y};
  }
}

TwoByTwoModel random_ds_2x2(Rng& rng) {
  return {{random_distribution(rng), random_distribution(rng), random_distribution(rng),
           random_distribution(rng)},
          LinearBound::x_bound(uniform(rng, -1.0, 1.0)),
          LinearBound::y_bound(uniform(rng, -1.0, 1.0))};
}

MultiBoundModel random_concurrent(Rng& rng, std::size_t levels) {
  const auto b = random_tilted_bounds(rng);
  std::vector<LinearBound> bx{b.x}, by{b.y};
  for (std::size_t i = 1; i + 1 < levels; ++i) {
    bx.push_back(LinearBound::x_bound(bx.back().intercept() + uniform(rng, 0.3, 1.5), b.x.slope()));
    by.push_back(LinearBound::y_bound(by.back().intercept() + uniform(rng, 0.3, 1.5), b.y.slope()));
  }
  std::vector<PerceptualDistribution> d;
  for (int s = 0; s < 4; ++s) d.push_back(random_distribution(rng));
  return {MultiBoundKind::ConcurrentRatings, 2, 2, std::move(d), std::move(bx), std::move(by)};
}

GrtWindModel random_grtwind(Rng& rng, std::size_t subjects) {
  std::vector<SubjectParams> subs;
  for (std::size_t k = 0; k < subjects; ++k) {
    const auto b = random_tilted_bounds(rng);
    subs.emplace_back(uniform(rng, 0.5, 2.0), uniform(rng, 0.2, 0.8), b.x, b.y);
  }
  return {{random_distribution(rng), random_distribution(rng), random_distribution(rng),
           random_distribution(rng)},
          std::move(subs)};
}

}  // namespace grt::testing
