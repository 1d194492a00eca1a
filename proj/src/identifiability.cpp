#include "grt/identifiability.hpp"

#include <algorithm>
#include <sstream>

#include "grt/probability.hpp"
#include "parameter_layout.hpp"

namespace grt {

namespace {

long data_dof_for(ModelClass cls, const ModelSize& size) {
  const long n = static_cast<long>(size.x_levels);
  const long m = static_cast<long>(size.y_levels);
  switch (cls) {
    case ModelClass::TwoByTwo:
      return 12;
    case ModelClass::ConcurrentRatings:
      return 4 * (n * m - 1);
    case ModelClass::NxM:
      return n * m * (n * m - 1);
    case ModelClass::GrtWind:
      return 12 * static_cast<long>(size.subjects);
  }
  return 0;
}

}  // namespace

DofReport audit(ModelClass cls, ModelSize size, const ConstraintScheme& scheme) {
  const detail::ParameterLayout layout(cls, size, scheme);
  DofReport r;
  r.model_class = cls;
  r.size = layout.size();
  r.scheme = scheme;
  r.data_dof = data_dof_for(cls, r.size);
  r.perceptual_parameters = layout.perceptual_conventional();
  r.decisional_parameters = layout.decisional();
  r.scaling_parameters = layout.scaling();
  r.free_parameters = r.perceptual_parameters + r.decisional_parameters + r.scaling_parameters;
  r.structural_free_parameters = static_cast<long>(layout.dimension());
  r.counting_ok = r.free_parameters <= r.data_dof;
  r.scheme_complete = scheme.complete();
  r.identifiable_under_scheme = r.counting_ok && r.scheme_complete;

  std::ostringstream notes;
  notes << "necessary-conditions check";
  if (!r.counting_ok) {
    notes << "; over-parameterized: " << r.free_parameters << " free parameters > " << r.data_dof
          << " data degrees of freedom";
  }
  if (!r.scheme_complete) {
    notes << "; constraint scheme leaves";
    if (scheme.location_fix.kind == LocationFix::Kind::None) notes << " location";
    if (scheme.scale_fix.kind == ScaleFix::Kind::None) notes << " scale";
    if (scheme.orthogonality_fix == OrthogonalityFix::None) notes << " orthogonality";
    notes << " unfixed";
  }
  if (cls == ModelClass::GrtWind && r.size.subjects < 3) {
    r.identifiable_under_scheme = false;
    notes << "; GRTwIND needs data from at least three subjects";
  }
  if (r.structural_free_parameters != r.free_parameters) {
    notes << "; conventional count charges five (co)variance parameters per free distribution, "
          << r.structural_free_parameters << " are estimated";
  }
  r.notes = notes.str();
  return r;
}

ConstraintScheme default_scheme(ModelClass cls) {
  ConstraintScheme s;
  s.location_fix = LocationFix::mean_at_origin(0);
  switch (cls) {
    case ModelClass::TwoByTwo:
      s.scale_fix = ScaleFix::unit_variances_all();
      s.orthogonality_fix = OrthogonalityFix::AssumeDS;
      break;
    case ModelClass::ConcurrentRatings:
    case ModelClass::NxM:
      s.scale_fix = ScaleFix::unit_variances_one(0);
      s.orthogonality_fix = OrthogonalityFix::AssumeDS;
      break;
    case ModelClass::GrtWind:
      s.scale_fix = ScaleFix::unit_variances_one(0);
      s.orthogonality_fix = OrthogonalityFix::UniversalPerception;
      break;
  }
  return s;
}

std::array<DofReport, 2> audit_two_by_two_conventions() {
  ConstraintScheme all = default_scheme(ModelClass::TwoByTwo);
  ConstraintScheme one = all;
  one.scale_fix = ScaleFix::unit_variances_one(0);
  return {audit(ModelClass::TwoByTwo, {}, all), audit(ModelClass::TwoByTwo, {}, one)};
}

namespace {

bool all_identity(const std::vector<AffineTransform>& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const AffineTransform& t) { return t.is_identity(); });
}

void certify_two_by_two(const TwoByTwoModel& model, EquivalenceCertificate& cert) {
  const auto original = response_probabilities(model, IntegrationRoute::ObliqueCoordinates);
  auto ds = induce_ds(model);

  EquivalenceTwin twin{"induce_ds", std::nullopt, ds.model, {ds.transform}, 0.0, false};
  twin.discrepancy = max_abs_difference(original, response_probabilities(ds.model));
  twin.identity = all_identity(twin.transforms);
  cert.twins.push_back(std::move(twin));

  const bool was_ds = check_ds(model).both();
  auto norm = normalize_model(ds.model);
  std::vector<AffineTransform> ts;
  for (const auto& t : norm.transforms) ts.push_back(was_ds ? t : ds.transform.then(t));
  EquivalenceTwin ntwin{was_ds ? "normalize" : "induce_ds+normalize", std::nullopt, norm.model,
                        std::move(ts), 0.0, false};
  ntwin.discrepancy = max_abs_difference(original, response_probabilities(norm.model));
  ntwin.identity = all_identity(ntwin.transforms);
  cert.twins.push_back(std::move(ntwin));
}

void certify_multi_bound(const MultiBoundModel& model, EquivalenceCertificate& cert) {
  const auto original = response_probabilities(model, IntegrationRoute::ObliqueCoordinates);
  auto ds = induce_ds(model);
  EquivalenceTwin twin{"induce_ds", std::nullopt, ds.model, {ds.transform}, 0.0, false};
  twin.discrepancy = max_abs_difference(original, response_probabilities(ds.model));
  twin.identity = all_identity(twin.transforms);
  cert.twins.push_back(std::move(twin));
}

void certify_grtwind(const GrtWindModel& model, EquivalenceCertificate& cert) {
  auto image = subject_specific_induce_ds(model);
  for (std::size_t k = 0; k < model.subject_count(); ++k) {
    const auto original =
        grtwind_response_probabilities(model, k, IntegrationRoute::ObliqueCoordinates);
    EquivalenceTwin twin{"induce_ds", k, image.models[k], {image.transforms[k]}, 0.0, false};
    twin.discrepancy = max_abs_difference(original, response_probabilities(image.models[k]));
    twin.identity = all_identity(twin.transforms);
    cert.twins.push_back(std::move(twin));
  }
  cert.universal_perception_violated = universal_perception_violated(image.models);
}

}  // namespace

EquivalenceCertificate equivalence_certificate(const AnyModel& model) {
  EquivalenceCertificate cert;
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    certify_two_by_two(*m, cert);
  } else if (const auto* mb = std::get_if<MultiBoundModel>(&model)) {
    certify_multi_bound(*mb, cert);
  } else {
    certify_grtwind(std::get<GrtWindModel>(model), cert);
  }
  for (const auto& t : cert.twins) cert.max_discrepancy = std::max(cert.max_discrepancy, t.discrepancy);
  cert.passed = cert.max_discrepancy < kCertificateTolerance;
  return cert;
}

}  // namespace grt
