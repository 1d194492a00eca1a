#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grt/errors.hpp"
#include "grt/probability.hpp"
#include "grt/transforms.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace grt;
using grt::testing::Rng;

namespace {

constexpr double kEq = 1e-10;

double oblique_gap(const TwoByTwoModel& a, const TwoByTwoModel& b) {
  return max_abs_difference(response_probabilities(a, IntegrationRoute::ObliqueCoordinates),
                            response_probabilities(b, IntegrationRoute::ObliqueCoordinates));
}

}  // namespace

TEST_CASE("elementary transforms") {
  const Vec2 p(1.0, 2.0);
  CHECK((rotation(std::numbers::pi / 2).apply(p) - Vec2(-2.0, 1.0)).norm() < 1e-15);
  CHECK((shear(std::numbers::pi / 4).apply(p) - Vec2(-1.0, 2.0)).norm() < 1e-15);
  CHECK(reflection_x().apply(p) == Vec2(-1.0, 2.0));
  CHECK(translation(Vec2(1, 1)).apply(p) == Vec2(2.0, 3.0));
  CHECK_THROWS_AS(shear(0.0), DegenerateAngleError);
  CHECK_THROWS_AS(AffineTransform(Mat2::Zero(), Vec2::Zero(), provenance::Identity{}), DomainError);
  CHECK(AffineTransform::identity().is_identity());
  CHECK_FALSE(rotation(0.1).is_identity());
}

TEST_CASE("composition and inverse") {
  const auto t = rotation(0.3).then(shear(1.1)).then(translation(Vec2(0.5, -2.0)));
  const Vec2 p(0.7, -1.3);
  const Vec2 manual = shear(1.1).apply(rotation(0.3).apply(p)) + Vec2(0.5, -2.0);
  CHECK((t.apply(p) - manual).norm() < 1e-14);
  CHECK((t.inverse().apply(t.apply(p)) - p).norm() < 1e-14);
  CHECK(std::holds_alternative<provenance::Composite>(t.provenance()));
  CHECK(std::holds_alternative<provenance::Inverse>(t.inverse().provenance()));
}

TEST_CASE("covariance under an affine map is the matrix conjugation") {
  const Covariance c{1.5, -0.4, 0.8};
  const auto t = rotation(-0.7).then(shear(2.0));
  const auto got = t.apply(c);
  const auto want = grt::testing::conjugate(t.linear(), c);
  CHECK(got.xx == doctest::Approx(want.xx).epsilon(1e-14));
  CHECK(got.xy == doctest::Approx(want.xy).epsilon(1e-14));
  CHECK(got.yy == doctest::Approx(want.yy).epsilon(1e-14));
}

TEST_CASE("induce_ds produces a DS twin with the same probabilities") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto m = grt::testing::random_ds_failing_2x2(rng);
    const auto [twin, t] = induce_ds(m);
    CHECK(check_ds(twin).both());
    CHECK(twin.bound_x().slope() == 0.0);
    CHECK(twin.bound_y().slope() == 0.0);
    CHECK(oblique_gap(m, twin) < kEq);
    // the bound intersection is a fixed point
    const Vec2 q = bound_intersection(m.bound_x(), m.bound_y());
    CHECK((t.apply(q) - q).norm() < 1e-12);
    // every distribution is mapped by the recorded transform
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK((t.apply(m.distributions()[s].mean()) - twin.distributions()[s].mean()).norm() < 1e-12);
    }
  }
}

TEST_CASE("induce_ds handles the reflected configuration") {
  // slope product > 1: the rotated x-bound points downward
  const PerceptualDistribution d(Vec2(0.2, 0.1), Covariance{1.0, 0.3, 1.2});
  const TwoByTwoModel m({d, d, d, d}, LinearBound::x_bound(0.1, 1.5), LinearBound::y_bound(-0.2, 0.9));
  const auto g = bound_geometry(m.bound_x(), m.bound_y());
  CHECK(g.reflected);
  const auto [twin, t] = induce_ds(m);
  CHECK(check_ds(twin).both());
  CHECK(oblique_gap(m, twin) < kEq);
  CHECK(t.linear().determinant() < 0.0);
}

TEST_CASE("induce_ds is the exact identity on DS models") {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto m = grt::testing::random_ds_2x2(rng);
    const auto [twin, t] = induce_ds(m);
    CHECK(twin == m);
    CHECK(t.is_identity());
  }
}

TEST_CASE("multi-bound induce_ds") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const auto m = grt::testing::random_concurrent(rng, 3);
    const auto [twin, t] = induce_ds(m);
    CHECK(check_ds(twin).both());
    CHECK(max_abs_difference(response_probabilities(m, IntegrationRoute::ObliqueCoordinates),
                             response_probabilities(twin, IntegrationRoute::ObliqueCoordinates)) < kEq);
    for (std::size_t b = 0; b + 1 < twin.bounds_x().size(); ++b)
      CHECK(twin.bounds_x()[b].intercept() < twin.bounds_x()[b + 1].intercept());
  }
}

TEST_CASE("mean-variance normalization") {
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const auto d = grt::testing::random_distribution(rng);
    const Vec2 c(std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng));
    const auto [n, t] = normalize_mean_variance(d, c);
    CHECK(n.covariance().xx == 1.0);
    CHECK(n.covariance().yy == 1.0);
    CHECK(n.covariance().xy == d.correlation());
    const double zx = (c.x() - d.mean().x()) / std::sqrt(d.covariance().xx);
    const double zy = (c.y() - d.mean().y()) / std::sqrt(d.covariance().yy);
    CHECK(std::abs((c.x() - n.mean().x()) - zx) < 1e-12);
    CHECK(std::abs((c.y() - n.mean().y()) - zy) < 1e-12);
    CHECK((t.apply(c) - c).norm() < 1e-14);
  }
}

TEST_CASE("normalize_model preserves probabilities and requires DS") {
  Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    const auto m = grt::testing::random_ds_2x2(rng);
    const auto out = normalize_model(m);
    CHECK(out.transforms.size() == 4);
    CHECK(max_abs_difference(response_probabilities(m), response_probabilities(out.model)) < kEq);
    for (const auto& d : out.model.distributions()) {
      CHECK(d.covariance().xx == 1.0);
      CHECK(d.covariance().yy == 1.0);
    }
  }
  CHECK_THROWS_AS(normalize_model(grt::testing::random_ds_failing_2x2(rng)), PreconditionError);
}

TEST_CASE("bound geometry matches the slopes") {
  const auto g = bound_geometry(LinearBound::x_bound(0.0, 0.4), LinearBound::y_bound(0.0, 0.3));
  CHECK(g.phi == doctest::Approx(-std::atan(0.3)));
  CHECK(g.omega > 0.0);
  CHECK(g.omega < std::numbers::pi);
  CHECK_FALSE(g.reflected);
  CHECK_THROWS_AS(bound_geometry(LinearBound::x_bound(0.0, 2.0), LinearBound::y_bound(1.0, 0.5)),
                  DegenerateAngleError);
}
