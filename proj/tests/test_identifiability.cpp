#include <doctest.h>

#include "grt/errors.hpp"
#include "grt/identifiability.hpp"
#include "random_models.hpp"

using namespace grt;
using grt::testing::Rng;

namespace {

DofReport audit_default(ModelClass cls, std::size_t x, std::size_t y, std::size_t subjects = 1) {
  return audit(cls, ModelSize{x, y, subjects}, default_scheme(cls));
}

}  // namespace

TEST_CASE("concurrent ratings 3x3: 32 data degrees of freedom, 20 parameters") {
  const auto r = audit_default(ModelClass::ConcurrentRatings, 3, 3);
  CHECK(r.data_dof == 32);
  CHECK(r.free_parameters == 20);
  CHECK(r.perceptual_parameters == 16);
  CHECK(r.decisional_parameters == 4);
  CHECK(r.identifiable_under_scheme);
}

TEST_CASE("n x m 3x3: 72 data degrees of freedom, 61 parameters") {
  const auto r = audit_default(ModelClass::NxM, 3, 3);
  CHECK(r.data_dof == 72);
  CHECK(r.free_parameters == 61);
  CHECK(r.perceptual_parameters == 57);
  CHECK(r.decisional_parameters == 4);
  CHECK(r.structural_free_parameters == 45);
  CHECK(r.counting_ok);
}

TEST_CASE("GRTwIND: 12N data degrees of freedom against 16 + 6N parameters") {
  for (std::size_t n = 1; n <= 12; ++n) {
    CAPTURE(n);
    const auto r = audit_default(ModelClass::GrtWind, 2, 2, n);
    CHECK(r.data_dof == static_cast<long>(12 * n));
    CHECK(r.free_parameters == static_cast<long>(16 + 6 * n));
    CHECK(r.perceptual_parameters == 16);
    CHECK(r.scaling_parameters == static_cast<long>(2 * n));
    CHECK(r.decisional_parameters == static_cast<long>(4 * n));
    CHECK(r.counting_ok == (n >= 3));
    CHECK(r.identifiable_under_scheme == (n >= 3));
  }
  const auto two = audit_default(ModelClass::GrtWind, 2, 2, 2);
  CHECK_FALSE(two.counting_ok);
  CHECK(two.free_parameters > two.data_dof);
}

TEST_CASE("2x2 variance conventions") {
  const auto [all, one] = audit_two_by_two_conventions();
  CHECK(all.free_parameters == 12);
  CHECK(all.data_dof == 12);
  CHECK(all.identifiable_under_scheme);
  CHECK(one.free_parameters == 18);
  CHECK_FALSE(one.counting_ok);
  CHECK_FALSE(one.identifiable_under_scheme);
}

TEST_CASE("incomplete schemes are not identifiable") {
  ConstraintScheme s = default_scheme(ModelClass::ConcurrentRatings);
  s.orthogonality_fix = OrthogonalityFix::None;
  const auto r = audit(ModelClass::ConcurrentRatings, {3, 3, 1}, s);
  CHECK_FALSE(r.scheme_complete);
  CHECK_FALSE(r.identifiable_under_scheme);
  CHECK(r.decisional_parameters == 6);
  CHECK(r.notes.rfind("necessary-conditions check", 0) == 0);
}

TEST_CASE("audit domain errors") {
  CHECK_THROWS_AS(audit(ModelClass::NxM, {1, 3, 1}, default_scheme(ModelClass::NxM)), DomainError);
  CHECK_THROWS_AS(audit(ModelClass::GrtWind, {2, 2, 0}, default_scheme(ModelClass::GrtWind)), DomainError);
  ConstraintScheme up = default_scheme(ModelClass::TwoByTwo);
  up.orthogonality_fix = OrthogonalityFix::UniversalPerception;
  CHECK_THROWS_AS(audit(ModelClass::TwoByTwo, {2, 2, 1}, up), DomainError);
  ConstraintScheme bi = default_scheme(ModelClass::GrtWind);
  bi.location_fix = LocationFix::bound_intersection_at_origin();
  CHECK_THROWS_AS(audit(ModelClass::GrtWind, {2, 2, 4}, bi), DomainError);
  ConstraintScheme far = default_scheme(ModelClass::TwoByTwo);
  far.location_fix = LocationFix::mean_at_origin(4);
  CHECK_THROWS_AS(audit(ModelClass::TwoByTwo, {2, 2, 1}, far), DomainError);
}

TEST_CASE("default schemes") {
  const auto s2 = default_scheme(ModelClass::TwoByTwo);
  CHECK(s2.location_fix == LocationFix::mean_at_origin(0));
  CHECK(s2.scale_fix == ScaleFix::unit_variances_all());
  CHECK(s2.orthogonality_fix == OrthogonalityFix::AssumeDS);
  CHECK(default_scheme(ModelClass::NxM).scale_fix == ScaleFix::unit_variances_one(0));
  CHECK(default_scheme(ModelClass::GrtWind).orthogonality_fix == OrthogonalityFix::UniversalPerception);
}

TEST_CASE("fixing perceptual means replaces the DS assumption") {
  ConstraintScheme s = default_scheme(ModelClass::TwoByTwo);
  s.orthogonality_fix = OrthogonalityFix::FixPerceptualMeans;
  const auto r = audit(ModelClass::TwoByTwo, {2, 2, 1}, s);
  CHECK(r.scheme_complete);
  // slopes become free, two mean coordinates are fixed
  CHECK(r.decisional_parameters == 4);
  CHECK(r.perceptual_parameters == 8);
  CHECK(r.free_parameters == 12);
}

TEST_CASE("equivalence certificates") {
  Rng rng(53);
  SUBCASE("2x2") {
    const auto m = grt::testing::random_ds_failing_2x2(rng);
    const auto c = equivalence_certificate(AnyModel{m});
    CHECK(c.passed);
    CHECK(c.max_discrepancy < kCertificateTolerance);
    REQUIRE(c.twins.size() == 2);
    CHECK(c.twins[0].kind == "induce_ds");
    CHECK_FALSE(c.twins[0].identity);
    CHECK(c.twins[1].kind == "induce_ds+normalize");
  }
  SUBCASE("DS 2x2 gives an identity twin") {
    const auto c = equivalence_certificate(AnyModel{grt::testing::random_ds_2x2(rng)});
    CHECK(c.passed);
    CHECK(c.twins[0].identity);
    CHECK(c.twins[1].kind == "normalize");
  }
  SUBCASE("multi-bound") {
    const auto c = equivalence_certificate(AnyModel{grt::testing::random_concurrent(rng, 3)});
    CHECK(c.passed);
    CHECK(c.twins.size() == 1);
  }
  SUBCASE("GRTwIND") {
    const auto m = grt::testing::random_grtwind(rng, 4);
    const auto c = equivalence_certificate(AnyModel{m});
    CHECK(c.passed);
    CHECK(c.twins.size() == 4);
    CHECK(c.universal_perception_violated);
    CHECK(c.twins[3].subject == std::optional<std::size_t>(3));
  }
}
