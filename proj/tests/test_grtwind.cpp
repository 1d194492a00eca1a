#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "grt/errors.hpp"
#include "grt/grtwind.hpp"
#include "grt/probability.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace grt;
using grt::testing::Rng;

namespace {

PerceptualDistribution unit(double x, double y) { return {Vec2(x, y), Covariance{}}; }

GrtWindModel ds_grtwind(std::size_t n) {
  std::vector<SubjectParams> subs;
  for (std::size_t k = 0; k < n; ++k)
    subs.emplace_back(1.0 + 0.1 * k, 0.5, LinearBound::x_bound(0.5), LinearBound::y_bound(0.4));
  return {{unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)}, std::move(subs)};
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("subject covariance scaling") {
  const Covariance g{2.0, 0.6, 1.5};
  const auto c = subject_covariance(g, 2.0, 0.25);
  CHECK(c.xx == doctest::Approx(2.0 / (2.0 * 0.25)));
  CHECK(c.xy == doctest::Approx(0.6 / (2.0 * std::sqrt(0.25 * 0.75))));
  CHECK(c.yy == doctest::Approx(1.5 / (2.0 * 0.75)));
  // correlation is untouched by kappa and lambda
  CHECK(c.correlation() == doctest::Approx(g.correlation()).epsilon(1e-14));
  CHECK_THROWS_AS(subject_covariance(g, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(subject_covariance(g, 1.0, 1.0), DomainError);
}

TEST_CASE("subject parameter and model invariants") {
  CHECK_THROWS_AS(SubjectParams(-1.0, 0.5, LinearBound::x_bound(0), LinearBound::y_bound(0)), DomainError);
  CHECK_THROWS_AS(SubjectParams(1.0, 0.0, LinearBound::x_bound(0), LinearBound::y_bound(0)), DomainError);
  CHECK_THROWS_AS(SubjectParams(1.0, 0.5, LinearBound::x_bound(0, 2.0), LinearBound::y_bound(1, 0.5)),
                  DegenerateAngleError);
  CHECK_THROWS(GrtWindModel({unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)}, {}));

  ConstraintScheme s;
  s.location_fix = LocationFix::mean_at_origin(1);
  CHECK_THROWS_AS(GrtWindModel({unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)},
                               {SubjectParams(1, 0.5, LinearBound::x_bound(0), LinearBound::y_bound(0))}, s),
                  InvariantError);

  const auto m = ds_grtwind(3);
  const auto sm = subject_model(m, 2);
  CHECK(sm.distributions()[0].covariance().xx == doctest::Approx(1.0 / (1.2 * 0.5)));
  CHECK_THROWS_AS(subject_model(m, 3), InvariantError);
}

TEST_CASE("expanded rotation and shear agree with matrix conjugation") {
  Rng rng(41);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi), om(0.2, std::numbers::pi - 0.2);
  for (int i = 0; i < 500; ++i) {
    const auto d = grt::testing::random_distribution(rng);
    const double phi = ang(rng), omega = om(rng);
    const double cot = 1.0 / std::tan(omega);
    const auto theta = rotated_covariance_expanded(d.covariance(), std::cos(phi), std::sin(phi));
    const auto theta_ref = grt::testing::conjugate(rotation(phi).linear(), d.covariance());
    CHECK(relative(theta.xx, theta_ref.xx) < 1e-12);
    CHECK(relative(theta.xy, theta_ref.xy) < 1e-12);
    CHECK(relative(theta.yy, theta_ref.yy) < 1e-12);
    const auto psi = sheared_covariance_expanded(theta, cot);
    const auto psi_ref = grt::testing::conjugate(shear(omega).linear(), theta_ref);
    CHECK(relative(psi.xx, psi_ref.xx) < 1e-12);
    CHECK(relative(psi.xy, psi_ref.xy) < 1e-12);
    CHECK(relative(psi.yy, psi_ref.yy) < 1e-12);
    const Vec2 nu = rotated_sheared_mean_expanded(d.mean(), std::cos(phi), std::sin(phi), cot);
    const Vec2 nu_ref = shear(omega).linear() * rotation(phi).linear() * d.mean();
    CHECK(relative(nu.x(), nu_ref.x()) < 1e-12);
    CHECK(relative(nu.y(), nu_ref.y()) < 1e-12);
  }
}

TEST_CASE("the (1 + tan w)/tan w coefficient on Theta12 is wrong away from tan w = 1") {
  const Covariance theta{1.3, 0.45, 0.9};
  auto quoted = [&](double omega) {
    const double t = std::tan(omega);
    return theta.xx - (1.0 + t) / t * theta.xy + theta.yy / (t * t);
  };
  const double omega = std::numbers::pi / 3;
  const double shipped = sheared_covariance_expanded(theta, 1.0 / std::tan(omega)).xx;
  const double reference = grt::testing::conjugate(shear(omega).linear(), theta).xx;
  CHECK(shipped == doctest::Approx(reference).epsilon(1e-14));
  CHECK(std::abs(quoted(omega) - reference) > 0.1);
  // the two coincide at omega = pi/4
  CHECK(quoted(std::numbers::pi / 4) ==
        doctest::Approx(sheared_covariance_expanded(theta, 1.0 / std::tan(std::numbers::pi / 4)).xx));
}

TEST_CASE("the shear term of the mean image uses the rotated y-coordinate") {
  // a commonly quoted form subtracts (mu_x cos - mu_y sin)/tan w instead of (mu_x sin + mu_y cos)/tan w
  const Vec2 mu(0.8, -1.1);
  const double phi = -0.4, omega = 1.1, c = std::cos(phi), s = std::sin(phi), t = std::tan(omega);
  const double quoted = mu.x() * c - mu.y() * s - mu.x() * c / t + mu.y() * s / t;
  const Vec2 shipped = rotated_sheared_mean_expanded(mu, c, s, 1.0 / t);
  const Vec2 reference = shear(omega).linear() * rotation(phi).linear() * mu;
  CHECK(shipped.x() == doctest::Approx(reference.x()).epsilon(1e-14));
  CHECK(std::abs(quoted - reference.x()) > 0.1);
}

TEST_CASE("subject-specific induce_ds preserves each subject's probabilities") {
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    const auto m = grt::testing::random_grtwind(rng, 3 + i % 5);
    const auto out = subject_specific_induce_ds(m);
    REQUIRE(out.models.size() == m.subject_count());
    for (std::size_t k = 0; k < m.subject_count(); ++k) {
      CHECK(check_ds(out.models[k]).both());
      const auto p0 = grtwind_response_probabilities(m, k, IntegrationRoute::ObliqueCoordinates);
      CHECK(max_abs_difference(p0, response_probabilities(out.models[k])) < 1e-10);
    }
    CHECK(universal_perception_violated(out.models));
  }
}

TEST_CASE("parallel and serial subject transforms are identical") {
  Rng rng(47);
  const auto m = grt::testing::random_grtwind(rng, 9);
  const auto a = subject_specific_induce_ds(m);
  const auto b = subject_specific_induce_ds_serial(m);
  CHECK(a.models == b.models);
  for (std::size_t k = 0; k < a.transforms.size(); ++k) {
    CHECK(a.transforms[k].linear() == b.transforms[k].linear());
    CHECK(a.transforms[k].offset() == b.transforms[k].offset());
  }
}

TEST_CASE("DS subjects keep universal perception") {
  const auto m = ds_grtwind(4);
  const auto out = subject_specific_induce_ds(m);
  CHECK_FALSE(universal_perception_violated(out.models));
  for (const auto& t : out.transforms) CHECK(t.is_identity());
}

TEST_CASE("identical tilted bounds in every subject keep universal perception") {
  std::vector<SubjectParams> subs;
  for (int k = 0; k < 3; ++k)
    subs.emplace_back(1.0, 0.5, LinearBound::x_bound(0.5, 0.2), LinearBound::y_bound(0.4, -0.3));
  const GrtWindModel m({unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)}, subs);
  CHECK_FALSE(universal_perception_violated(subject_specific_induce_ds(m).models));
}
