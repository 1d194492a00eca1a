#pragma once

// JSON and CSV formats.
//
// Model documents:
//   {"schema_version": 1, "class": "2x2", "distributions": [...4], "bound_x": B, "bound_y": B,
//    "constraints": C}
//   {"schema_version": 1, "class": "multibound", "kind": "concurrent" | "nxm",
//    "stimulus_levels": [nx, ny], "distributions": [...], "bounds_x": [B...], "bounds_y": [B...],
//    "constraints": C}
//   {"schema_version": 1, "class": "grtwind", "group_distributions": [...4],
//    "subjects": [{"kappa": k, "lambda": l, "bound_x": B, "bound_y": B}, ...], "constraints": C}
// with distributions {"mean": [x, y], "covariance": [sxx, sxy, syy]}, bounds
// {"intercept": c, "slope": b} and constraints
//   {"location": {"kind": "mean_at_origin", "stimulus": 0} | {"kind": "bound_intersection_at_origin"}
//                | {"kind": "none"},
//    "scale": {"kind": "unit_variances_one", "stimulus": 0} | {"kind": "unit_variances_all"}
//             | {"kind": "none"},
//    "orthogonality": "assume_ds" | "fix_perceptual_means" | "universal_perception" | "none"}
// Doubles are written in shortest round-trip form, so parse(serialize(m)) == m.
//
// Confusion matrices are CSV: a header row "stimulus,<response labels...>", then
// one row per stimulus: label followed by integer counts. GRTwIND data live in a
// directory of subject_<k>.csv files, k = 1..N.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "grt/fitting.hpp"
#include "grt/identifiability.hpp"
#include "grt/model.hpp"
#include "grt/transforms.hpp"

namespace grt::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const AnyModel& model);
/// Throws ParseError for schema violations; InvariantError (naming the offending
/// distribution) and other library errors for invalid values.
AnyModel model_from_json(const json& doc);

json to_json(const ConstraintScheme& scheme);
ConstraintScheme scheme_from_json(const json& doc);

json to_json(const AffineTransform& transform);
json to_json(const DofReport& report);
json to_json(const FitResult& result);
json to_json(const EquivalenceCertificate& cert);
json to_json(const TwinLikelihoodReport& report);

/// Aligned plain-text rendering of a DofReport.
std::string format_report(const DofReport& report);

/// Throws IoError when unreadable, ParseError when not valid JSON.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

AnyModel read_model(const std::filesystem::path& path);

std::string to_csv(const ConfusionMatrix& data);
ConfusionMatrix confusion_from_csv(std::istream& in);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& data);

/// A single CSV file, or a directory of subject_<k>.csv files (k = 1..N, contiguous).
std::vector<ConfusionMatrix> read_data(const std::filesystem::path& path);
/// Writes subject_1.csv ... subject_N.csv into `dir` (created if missing).
void write_subject_csvs(const std::filesystem::path& dir, const std::vector<ConfusionMatrix>& data);

/// Equal-likelihood contour points (Mahalanobis radius `radius`) of every
/// distribution, as CSV "subject,stimulus,point,x,y". Subject is 0 for
/// single-subject models; GRTwIND emits each subject's scaled distributions.
std::string ellipse_csv(const AnyModel& model, std::size_t points = 64, double radius = 1.0);

/// Same format for a list of per-subject 2x2 models (subjects numbered from 1).
std::string subject_ellipse_csv(std::span<const TwoByTwoModel> models, std::size_t points = 64,
                                double radius = 1.0);

}  // namespace grt::io
