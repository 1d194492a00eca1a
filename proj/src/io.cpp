#include "grt/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

#include "grt/errors.hpp"

namespace grt::io {

namespace {

const json& field(const json& doc, const char* key, const std::string& where) {
  if (!doc.is_object()) throw ParseError(where + ": expected an object");
  const auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

std::size_t index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& where, std::size_t size = 0) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  if (size != 0 && v.size() != size) {
    throw ParseError(where + ": expected " + std::to_string(size) + " entries");
  }
  return v;
}

json to_json(const PerceptualDistribution& d) {
  return {{"mean", {d.mean().x(), d.mean().y()}},
          {"covariance", {d.covariance().xx, d.covariance().xy, d.covariance().yy}}};
}

PerceptualDistribution distribution_from_json(const json& doc, const std::string& where) {
  const json& mean = array(field(doc, "mean", where), where + ".mean", 2);
  const json& cov = array(field(doc, "covariance", where), where + ".covariance", 3);
  const Vec2 mu(number(mean[0], where + ".mean[0]"), number(mean[1], where + ".mean[1]"));
  const Covariance c{number(cov[0], where + ".covariance[0]"),
                     number(cov[1], where + ".covariance[1]"),
                     number(cov[2], where + ".covariance[2]")};
  try {
    return {mu, c};
  } catch (const InvariantError& e) {
    throw InvariantError(where + ": " + e.what());
  }
}

std::vector<PerceptualDistribution> distributions_from_json(const json& v, const std::string& where,
                                                            std::size_t x_levels,
                                                            std::size_t y_levels,
                                                            std::size_t expected = 0) {
  array(v, where, expected);
  std::vector<PerceptualDistribution> out;
  for (std::size_t s = 0; s < v.size(); ++s) {
    std::string label = where + "[" + std::to_string(s) + "]";
    if (y_levels > 0 && s < x_levels * y_levels) {
      label += " (" + stimulus_label(s / y_levels, s % y_levels) + ")";
    }
    out.push_back(distribution_from_json(v[s], label));
  }
  return out;
}

json to_json(const LinearBound& b) { return {{"intercept", b.intercept()}, {"slope", b.slope()}}; }

LinearBound bound_from_json(const json& doc, BoundOrientation o, const std::string& where) {
  const double c = number(field(doc, "intercept", where), where + ".intercept");
  double slope = 0.0;
  if (doc.contains("slope")) slope = number(doc["slope"], where + ".slope");
  try {
    return {o, c, slope};
  } catch (const InvariantError& e) {
    throw InvariantError(where + ": " + e.what());
  }
}

std::vector<LinearBound> bounds_from_json(const json& v, BoundOrientation o,
                                          const std::string& where) {
  array(v, where);
  std::vector<LinearBound> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(bound_from_json(v[i], o, where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <class Range>
json distributions_to_json(const Range& dists) {
  json out = json::array();
  for (const auto& d : dists) out.push_back(to_json(d));
  return out;
}

json vec(const Vec2& v) { return {v.x(), v.y()}; }

json provenance_to_json(const Provenance& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, provenance::Identity>) {
          return {{"type", "identity"}};
        } else if constexpr (std::is_same_v<T, provenance::Rotation>) {
          return {{"type", "rotation"}, {"phi", v.phi}};
        } else if constexpr (std::is_same_v<T, provenance::Shear>) {
          return {{"type", "shear"}, {"omega", v.omega}};
        } else if constexpr (std::is_same_v<T, provenance::Reflection>) {
          return {{"type", "reflection_x"}};
        } else if constexpr (std::is_same_v<T, provenance::Translation>) {
          return {{"type", "translation"}, {"shift", vec(v.shift)}};
        } else if constexpr (std::is_same_v<T, provenance::MeanVarianceNormalization>) {
          return {{"type", "mean_variance_normalization"},
                  {"scale", vec(v.scale)},
                  {"shift", vec(v.shift)}};
        } else if constexpr (std::is_same_v<T, provenance::Composite>) {
          json parts = json::array();
          for (const auto& t : v.parts) parts.push_back(grt::io::to_json(t));
          return {{"type", "composite"}, {"parts", parts}};
        } else {
          return {{"type", "inverse"}, {"of", grt::io::to_json(v.of.front())}};
        }
      },
      p);
}

}  // namespace

json to_json(const ConstraintScheme& s) {
  json loc;
  switch (s.location_fix.kind) {
    case LocationFix::Kind::MeanAtOrigin:
      loc = {{"kind", "mean_at_origin"}, {"stimulus", s.location_fix.stimulus}};
      break;
    case LocationFix::Kind::BoundIntersectionAtOrigin:
      loc = {{"kind", "bound_intersection_at_origin"}};
      break;
    case LocationFix::Kind::None:
      loc = {{"kind", "none"}};
      break;
  }
  json scale;
  switch (s.scale_fix.kind) {
    case ScaleFix::Kind::UnitVariancesOneDistribution:
      scale = {{"kind", "unit_variances_one"}, {"stimulus", s.scale_fix.stimulus}};
      break;
    case ScaleFix::Kind::UnitVariancesAll:
      scale = {{"kind", "unit_variances_all"}};
      break;
    case ScaleFix::Kind::None:
      scale = {{"kind", "none"}};
      break;
  }
  const char* orth = "none";
  switch (s.orthogonality_fix) {
    case OrthogonalityFix::AssumeDS:
      orth = "assume_ds";
      break;
    case OrthogonalityFix::FixPerceptualMeans:
      orth = "fix_perceptual_means";
      break;
    case OrthogonalityFix::UniversalPerception:
      orth = "universal_perception";
      break;
    case OrthogonalityFix::None:
      break;
  }
  return {{"location", loc}, {"scale", scale}, {"orthogonality", orth}};
}

ConstraintScheme scheme_from_json(const json& doc) {
  const std::string where = "constraints";
  ConstraintScheme s;
  const json& loc = field(doc, "location", where);
  const std::string lk = text(field(loc, "kind", where + ".location"), where + ".location.kind");
  if (lk == "mean_at_origin") {
    s.location_fix = LocationFix::mean_at_origin(
        index(field(loc, "stimulus", where + ".location"), where + ".location.stimulus"));
  } else if (lk == "bound_intersection_at_origin") {
    s.location_fix = LocationFix::bound_intersection_at_origin();
  } else if (lk != "none") {
    throw ParseError(where + ".location.kind: unknown value '" + lk + "'");
  }
  const json& scale = field(doc, "scale", where);
  const std::string sk = text(field(scale, "kind", where + ".scale"), where + ".scale.kind");
  if (sk == "unit_variances_one") {
    s.scale_fix = ScaleFix::unit_variances_one(
        index(field(scale, "stimulus", where + ".scale"), where + ".scale.stimulus"));
  } else if (sk == "unit_variances_all") {
    s.scale_fix = ScaleFix::unit_variances_all();
  } else if (sk != "none") {
    throw ParseError(where + ".scale.kind: unknown value '" + sk + "'");
  }
  const std::string ok = text(field(doc, "orthogonality", where), where + ".orthogonality");
  if (ok == "assume_ds") {
    s.orthogonality_fix = OrthogonalityFix::AssumeDS;
  } else if (ok == "fix_perceptual_means") {
    s.orthogonality_fix = OrthogonalityFix::FixPerceptualMeans;
  } else if (ok == "universal_perception") {
    s.orthogonality_fix = OrthogonalityFix::UniversalPerception;
  } else if (ok != "none") {
    throw ParseError(where + ".orthogonality: unknown value '" + ok + "'");
  }
  return s;
}

json to_json(const AnyModel& model) {
  json out{{"schema_version", kSchemaVersion}};
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    out["class"] = "2x2";
    out["distributions"] = distributions_to_json(m->distributions());
    out["bound_x"] = to_json(m->bound_x());
    out["bound_y"] = to_json(m->bound_y());
    out["constraints"] = to_json(m->constraints());
  } else if (const auto* mb = std::get_if<MultiBoundModel>(&model)) {
    out["class"] = "multibound";
    out["kind"] = mb->kind() == MultiBoundKind::ConcurrentRatings ? "concurrent" : "nxm";
    out["stimulus_levels"] = {mb->stimulus_x_levels(), mb->stimulus_y_levels()};
    out["distributions"] = distributions_to_json(mb->distributions());
    json bx = json::array();
    json by = json::array();
    for (const auto& b : mb->bounds_x()) bx.push_back(to_json(b));
    for (const auto& b : mb->bounds_y()) by.push_back(to_json(b));
    out["bounds_x"] = bx;
    out["bounds_y"] = by;
    out["constraints"] = to_json(mb->constraints());
  } else {
    const auto& g = std::get<GrtWindModel>(model);
    out["class"] = "grtwind";
    out["group_distributions"] = distributions_to_json(g.group_distributions());
    json subjects = json::array();
    for (const auto& p : g.subjects()) {
      subjects.push_back({{"kappa", p.kappa()},
                          {"lambda", p.lambda()},
                          {"bound_x", to_json(p.bound_x())},
                          {"bound_y", to_json(p.bound_y())}});
    }
    out["subjects"] = subjects;
    out["constraints"] = to_json(g.constraints());
  }
  return out;
}

AnyModel model_from_json(const json& doc) {
  const std::string root = "model";
  if (doc.contains("schema_version") &&
      (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)) {
    throw ParseError("model: unsupported schema_version");
  }
  const std::string cls = text(field(doc, "class", root), "model.class");
  const ConstraintScheme scheme =
      doc.contains("constraints") ? scheme_from_json(doc["constraints"]) : ConstraintScheme{};

  if (cls == "2x2") {
    const auto d = distributions_from_json(field(doc, "distributions", root), "distributions", 2, 2, 4);
    return TwoByTwoModel({d[0], d[1], d[2], d[3]},
                         bound_from_json(field(doc, "bound_x", root), BoundOrientation::XBound, "bound_x"),
                         bound_from_json(field(doc, "bound_y", root), BoundOrientation::YBound, "bound_y"),
                         scheme);
  }
  if (cls == "multibound") {
    const std::string kind = text(field(doc, "kind", root), "model.kind");
    MultiBoundKind k;
    if (kind == "concurrent") {
      k = MultiBoundKind::ConcurrentRatings;
    } else if (kind == "nxm") {
      k = MultiBoundKind::NxMIdentification;
    } else {
      throw ParseError("model.kind: unknown value '" + kind + "'");
    }
    const auto bx = bounds_from_json(field(doc, "bounds_x", root), BoundOrientation::XBound, "bounds_x");
    const auto by = bounds_from_json(field(doc, "bounds_y", root), BoundOrientation::YBound, "bounds_y");
    std::size_t nx = 2, ny = 2;
    if (doc.contains("stimulus_levels")) {
      const json& lv = array(doc["stimulus_levels"], "model.stimulus_levels", 2);
      nx = index(lv[0], "model.stimulus_levels[0]");
      ny = index(lv[1], "model.stimulus_levels[1]");
    } else if (k == MultiBoundKind::NxMIdentification) {
      nx = bx.size() + 1;
      ny = by.size() + 1;
    }
    auto d = distributions_from_json(field(doc, "distributions", root), "distributions", nx, ny);
    return MultiBoundModel(k, nx, ny, std::move(d), bx, by, scheme);
  }
  if (cls == "grtwind") {
    const auto d = distributions_from_json(field(doc, "group_distributions", root),
                                           "group_distributions", 2, 2, 4);
    const json& subs = array(field(doc, "subjects", root), "subjects");
    std::vector<SubjectParams> subjects;
    for (std::size_t k = 0; k < subs.size(); ++k) {
      const std::string w = "subjects[" + std::to_string(k) + "]";
      const json& s = subs[k];
      try {
        subjects.emplace_back(number(field(s, "kappa", w), w + ".kappa"),
                              number(field(s, "lambda", w), w + ".lambda"),
                              bound_from_json(field(s, "bound_x", w), BoundOrientation::XBound, w + ".bound_x"),
                              bound_from_json(field(s, "bound_y", w), BoundOrientation::YBound, w + ".bound_y"));
      } catch (const DomainError& e) {
        throw DomainError(w + ": " + e.what());
      } catch (const DegenerateAngleError& e) {
        throw DegenerateAngleError(w + ": " + e.what());
      }
    }
    return GrtWindModel({d[0], d[1], d[2], d[3]}, std::move(subjects), scheme);
  }
  throw ParseError("model.class: unknown value '" + cls + "'");
}

json to_json(const AffineTransform& t) {
  return {{"linear", {{t.linear()(0, 0), t.linear()(0, 1)}, {t.linear()(1, 0), t.linear()(1, 1)}}},
          {"offset", vec(t.offset())},
          {"provenance", provenance_to_json(t.provenance())}};
}

json to_json(const DofReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"class", std::string(to_string(r.model_class))},
          {"levels", {r.size.x_levels, r.size.y_levels}},
          {"subjects", r.size.subjects},
          {"constraints", to_json(r.scheme)},
          {"data_dof", r.data_dof},
          {"free_parameters", r.free_parameters},
          {"perceptual_parameters", r.perceptual_parameters},
          {"decisional_parameters", r.decisional_parameters},
          {"scaling_parameters", r.scaling_parameters},
          {"structural_free_parameters", r.structural_free_parameters},
          {"counting_ok", r.counting_ok},
          {"scheme_complete", r.scheme_complete},
          {"identifiable_under_scheme", r.identifiable_under_scheme},
          {"over_parameterized", !r.counting_ok},
          {"notes", r.notes}};
}

json to_json(const FitResult& r) {
  return {{"schema_version", kSchemaVersion},
          {"log_likelihood", r.log_likelihood},
          {"n_free_parameters", r.n_free_parameters},
          {"aic", r.aic},
          {"bic", r.bic},
          {"converged", r.converged},
          {"termination", std::string(to_string(r.termination))},
          {"n_restarts_used", r.n_restarts_used},
          {"best_restart", r.best_restart},
          {"iterations", r.iterations},
          {"gradient_norm_at_solution", r.gradient_norm_at_solution},
          {"model", to_json(r.model)},
          {"audit", to_json(r.audit)}};
}

json to_json(const EquivalenceCertificate& c) {
  json twins = json::array();
  for (const auto& t : c.twins) {
    json transforms = json::array();
    for (const auto& tr : t.transforms) transforms.push_back(to_json(tr));
    json model = std::visit([](const auto& m) { return to_json(AnyModel(m)); }, t.model);
    twins.push_back({{"kind", t.kind},
                     {"subject", t.subject ? json(*t.subject) : json(nullptr)},
                     {"discrepancy", t.discrepancy},
                     {"identity", t.identity},
                     {"transforms", transforms},
                     {"model", model}});
  }
  return {{"schema_version", kSchemaVersion},
          {"max_discrepancy", c.max_discrepancy},
          {"tolerance", kCertificateTolerance},
          {"passed", c.passed},
          {"universal_perception_violated", c.universal_perception_violated},
          {"twins", twins}};
}

json to_json(const TwinLikelihoodReport& r) {
  json out{{"schema_version", kSchemaVersion},
           {"original_log_likelihood", r.original_log_likelihood},
           {"twin_log_likelihood", r.twin_log_likelihood},
           {"delta", r.delta},
           {"tolerance", kTwinLikelihoodTolerance},
           {"passed", std::abs(r.delta) < kTwinLikelihoodTolerance},
           {"identity_twin", r.identity_twin},
           {"per_subject_delta", r.per_subject_delta}};
  out["normalized_delta"] = r.normalized_delta ? json(*r.normalized_delta) : json(nullptr);
  return out;
}

std::string format_report(const DofReport& r) {
  std::ostringstream out;
  const auto row = [&](const std::string& k, const std::string& v) {
    out << std::left << std::setw(28) << k << v << '\n';
  };
  const auto yes = [](bool b) { return std::string(b ? "yes" : "no"); };
  row("class", std::string(to_string(r.model_class)));
  if (r.model_class == ModelClass::GrtWind) {
    row("subjects", std::to_string(r.size.subjects));
  } else {
    row("levels", std::to_string(r.size.x_levels) + " x " + std::to_string(r.size.y_levels));
  }
  row("data degrees of freedom", std::to_string(r.data_dof));
  row("perceptual parameters", std::to_string(r.perceptual_parameters));
  row("decisional parameters", std::to_string(r.decisional_parameters));
  row("scaling parameters", std::to_string(r.scaling_parameters));
  row("free parameters", std::to_string(r.free_parameters));
  row("estimated parameters", std::to_string(r.structural_free_parameters));
  row("over-parameterized", yes(!r.counting_ok));
  row("scheme complete", yes(r.scheme_complete));
  row("identifiable under scheme", yes(r.identifiable_under_scheme));
  row("notes", r.notes);
  return out.str();
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

AnyModel read_model(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return model_from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string to_csv(const ConfusionMatrix& data) {
  std::ostringstream out;
  out << "stimulus";
  for (const auto& l : data.response_labels()) out << ',' << l;
  out << '\n';
  for (std::size_t s = 0; s < data.stimuli(); ++s) {
    out << data.stimulus_labels()[s];
    for (std::size_t r = 0; r < data.responses(); ++r) out << ',' << data.count(s, r);
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ConfusionMatrix confusion_from_csv(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split(line));
  }
  if (rows.size() < 2) throw ParseError("confusion matrix CSV needs a header and at least one row");
  const auto& header = rows.front();
  if (header.size() < 2) throw ParseError("confusion matrix CSV header has no response columns");
  const std::size_t responses = header.size() - 1;
  std::vector<std::string> response_labels(header.begin() + 1, header.end());
  std::vector<std::string> stimulus_labels;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != header.size()) {
      throw ParseError("CSV row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                       " cells, header has " + std::to_string(header.size()));
    }
    stimulus_labels.push_back(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError("CSV row " + std::to_string(i + 1) + ", column " + std::to_string(c + 1) +
                         ": '" + cell + "' is not a non-negative integer");
      }
      try {
        counts.push_back(std::stoull(cell));
      } catch (const std::exception&) {
        throw ParseError("CSV row " + std::to_string(i + 1) + ": count out of range");
      }
    }
  }
  try {
    return {stimulus_labels.size(), responses, std::move(counts), std::move(stimulus_labels),
            std::move(response_labels)};
  } catch (const InvariantError& e) {
    throw ParseError(std::string("confusion matrix: ") + e.what());
  }
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return confusion_from_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_csv(data);
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<ConfusionMatrix> read_data(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError(path.string() + " does not exist");
  if (!fs::is_directory(path)) return {read_confusion_csv(path)};
  static const std::regex name(R"(subject_(\d+)\.csv)");
  std::map<std::size_t, fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    std::smatch m;
    const std::string fname = entry.path().filename().string();
    if (std::regex_match(fname, m, name)) files[std::stoul(m[1].str())] = entry.path();
  }
  if (files.empty()) throw IoError(path.string() + " contains no subject_<k>.csv files");
  std::vector<ConfusionMatrix> out;
  std::size_t expected = 1;
  for (const auto& [k, file] : files) {
    if (k != expected) {
      throw ParseError(path.string() + ": subject files must be numbered 1..N without gaps");
    }
    out.push_back(read_confusion_csv(file));
    ++expected;
  }
  return out;
}

void write_subject_csvs(const std::filesystem::path& dir, const std::vector<ConfusionMatrix>& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < data.size(); ++k) {
    write_confusion_csv(dir / ("subject_" + std::to_string(k + 1) + ".csv"), data[k]);
  }
}

namespace {

void ellipse_rows(std::ostringstream& out, std::size_t subject,
                  std::span<const PerceptualDistribution> dists, std::size_t y_levels,
                  std::size_t points, double radius) {
  for (std::size_t s = 0; s < dists.size(); ++s) {
    const Eigen::LLT<Mat2> llt(dists[s].covariance().matrix());
    const Mat2 l = llt.matrixL();
    for (std::size_t i = 0; i < points; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points);
      const Vec2 p = dists[s].mean() + radius * (l * Vec2(std::cos(t), std::sin(t)));
      out << subject << ',' << stimulus_label(s / y_levels, s % y_levels) << ',' << i << ','
          << std::setprecision(17) << p.x() << ',' << p.y() << '\n';
    }
  }
}

}  // namespace

namespace {

void check_ellipse(std::size_t points, double radius) {
  if (points < 3) throw DomainError("ellipse needs at least 3 points");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ellipse radius must be positive");
}

}  // namespace

std::string ellipse_csv(const AnyModel& model, std::size_t points, double radius) {
  check_ellipse(points, radius);
  std::ostringstream out;
  out << "subject,stimulus,point,x,y\n";
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    ellipse_rows(out, 0, m->distributions(), 2, points, radius);
  } else if (const auto* mb = std::get_if<MultiBoundModel>(&model)) {
    ellipse_rows(out, 0, mb->distributions(), mb->stimulus_y_levels(), points, radius);
  } else {
    const auto& g = std::get<GrtWindModel>(model);
    for (std::size_t k = 0; k < g.subject_count(); ++k) {
      const auto sm = subject_model(g, k);
      ellipse_rows(out, k + 1, sm.distributions(), 2, points, radius);
    }
  }
  return out.str();
}

std::string subject_ellipse_csv(std::span<const TwoByTwoModel> models, std::size_t points,
                                double radius) {
  check_ellipse(points, radius);
  std::ostringstream out;
  out << "subject,stimulus,point,x,y\n";
  for (std::size_t k = 0; k < models.size(); ++k) {
    ellipse_rows(out, k + 1, models[k].distributions(), 2, points, radius);
  }
  return out.str();
}

}  // namespace grt::io
