#pragma once

// Degrees-of-freedom accounting, the fitter's identifiability gate, and
// equivalence certificates (transformed twins with their probability discrepancies).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "grt/errors.hpp"
#include "grt/model.hpp"
#include "grt/transforms.hpp"

namespace grt {

struct DofReport {
  ModelClass model_class = ModelClass::TwoByTwo;
  ModelSize size;
  ConstraintScheme scheme;

  long data_dof = 0;
  long free_parameters = 0;  // perceptual + decisional + scaling
  long perceptual_parameters = 0;
  long decisional_parameters = 0;
  long scaling_parameters = 0;

  /// Parameters the fitter actually estimates. Differs from free_parameters only
  /// for n x m models, whose conventional count charges five (co)variance
  /// parameters per non-reference distribution where a bivariate covariance has three.
  long structural_free_parameters = 0;

  bool counting_ok = false;      // free_parameters <= data_dof
  bool scheme_complete = false;  // location, scale and orthogonality all fixed
  /// counting_ok && scheme_complete (&& at least three subjects for GRTwIND).
  /// A necessary-conditions check, not a proof of identifiability.
  bool identifiable_under_scheme = false;
  std::string notes;
};

/// Throws DomainError for levels < 2, zero subjects, or a scheme that does not
/// apply to the class (universal perception outside GRTwIND, bound-intersection
/// location for GRTwIND, fix indices out of range).
DofReport audit(ModelClass cls, ModelSize size, const ConstraintScheme& scheme);

/// Conventional scheme per class: mean of the first stimulus at the origin, DS
/// assumed, and unit variances on every distribution (2x2) or on the first one
/// (multi-bound). GRTwIND pins orthogonality through universal perception.
ConstraintScheme default_scheme(ModelClass cls);

/// The single-subject 2x2 class under both variance conventions: all
/// distributions unit variance (first) and only one (second).
std::array<DofReport, 2> audit_two_by_two_conventions();

class IdentifiabilityError : public Error {
 public:
  IdentifiabilityError(const std::string& what, DofReport report)
      : Error(what), report_(std::move(report)) {}
  const DofReport& report() const { return report_; }

 private:
  DofReport report_;
};

struct EquivalenceTwin {
  std::string kind;                      // "induce_ds" or "normalize"
  std::optional<std::size_t> subject;    // GRTwIND subject index
  SingleSubjectModel model;
  std::vector<AffineTransform> transforms;
  double discrepancy = 0.0;              // max-abs probability difference to the original
  bool identity = false;                 // every transform is exactly the identity
};

struct EquivalenceCertificate {
  std::vector<EquivalenceTwin> twins;
  double max_discrepancy = 0.0;
  bool universal_perception_violated = false;  // GRTwIND image only
  bool passed = false;                         // max_discrepancy < kCertificateTolerance
};

inline constexpr double kCertificateTolerance = 1e-10;

/// Builds every transformed twin the model admits and compares predicted
/// probabilities. The original is evaluated on the oblique-coordinate route so the
/// comparison never goes through the transform being certified.
EquivalenceCertificate equivalence_certificate(const AnyModel& model);

}  // namespace grt
