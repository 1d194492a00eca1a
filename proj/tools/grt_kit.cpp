// grt-kit: command-line front end.
//
// Exit status: 0 success, 1 domain/model errors (including failed checks),
// 2 I/O, parse and usage errors.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grt/errors.hpp"
#include "grt/fitting.hpp"
#include "grt/identifiability.hpp"
#include "grt/io.hpp"
#include "grt/kernels.hpp"
#include "grt/transforms.hpp"

namespace fs = std::filesystem;
using grt::io::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

struct Levels {
  std::size_t x = 3;
  std::size_t y = 3;
};

Levels parse_levels(const std::string& s) {
  const auto pos = s.find_first_of("xX");
  if (pos == std::string::npos) throw grt::ParseError("--levels expects NxM, e.g. 3x3");
  try {
    return {std::stoul(s.substr(0, pos)), std::stoul(s.substr(pos + 1))};
  } catch (const std::exception&) {
    throw grt::ParseError("--levels expects NxM, e.g. 3x3");
  }
}

grt::ModelClass parse_class(const std::string& s) {
  if (s == "2x2") return grt::ModelClass::TwoByTwo;
  if (s == "concurrent") return grt::ModelClass::ConcurrentRatings;
  if (s == "nxm") return grt::ModelClass::NxM;
  if (s == "grtwind") return grt::ModelClass::GrtWind;
  throw grt::ParseError("unknown model class '" + s + "'");
}

void emit(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    grt::io::write_json(path, doc);
  }
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw grt::IoError("cannot write " + path);
  out << text;
}

struct FitArgs {
  std::string model;
  std::string cls;
  std::string levels = "3x3";
  std::string data;
  std::string out;
  std::string model_out;
  std::size_t restarts = 20;
  std::size_t max_iterations = 200000;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  bool start_from_model = false;
  bool json_output = false;
};

int run_fit(const FitArgs& a) {
  const auto data = grt::io::read_data(a.data);
  grt::ModelClass cls;
  grt::ModelSize size;
  grt::ConstraintScheme scheme;
  std::optional<grt::AnyModel> tmpl;
  if (!a.model.empty()) {
    tmpl = grt::io::read_model(a.model);
    cls = grt::model_class(*tmpl);
    size = grt::model_size(*tmpl);
    scheme = grt::constraints_of(*tmpl);
  } else {
    if (a.cls.empty()) throw grt::ParseError("fit needs --model or --class");
    cls = parse_class(a.cls);
    const Levels lv = parse_levels(a.levels);
    size = {lv.x, lv.y, data.size()};
    scheme = grt::default_scheme(cls);
  }
  grt::FitOptions opt;
  opt.restarts = a.restarts;
  opt.max_iterations = a.max_iterations;
  opt.tolerance = a.tolerance;
  opt.seed = a.seed;
  if (a.start_from_model) {
    if (!tmpl) throw grt::ParseError("--start-from-model needs --model");
    opt.start = tmpl;
  }
  const grt::FitResult r = grt::fit(data, cls, size, scheme, opt);
  if (!a.model_out.empty()) grt::io::write_json(a.model_out, grt::io::to_json(r.model));
  if (a.json_output || !a.out.empty()) {
    emit(grt::io::to_json(r), a.out);
  } else {
    std::printf("log-likelihood      %.10g\n", r.log_likelihood);
    std::printf("free parameters     %ld\n", r.n_free_parameters);
    std::printf("AIC                 %.10g\n", r.aic);
    std::printf("BIC                 %.10g\n", r.bic);
    std::printf("converged           %s (%s)\n", r.converged ? "yes" : "no",
                std::string(grt::to_string(r.termination)).c_str());
    std::printf("restarts            %zu (best %zu)\n", r.n_restarts_used, r.best_restart);
    std::printf("gradient norm       %.3g\n", r.gradient_norm_at_solution);
  }
  return 0;
}

struct SimulateArgs {
  std::string model;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const auto model = grt::io::read_model(a.model);
  const auto data = grt::simulate(model, a.trials, a.seed);
  if (std::holds_alternative<grt::GrtWindModel>(model)) {
    if (a.out.empty()) throw grt::ParseError("GRTwIND simulation needs --out DIRECTORY");
    grt::io::write_subject_csvs(a.out, data);
  } else {
    emit_text(grt::io::to_csv(data.front()), a.out);
  }
  return 0;
}

struct TransformArgs {
  std::string model;
  std::string op = "induce-ds";
  std::string out;
  std::string transform_out;
  std::string ellipses;
};

int run_transform(const TransformArgs& a) {
  const auto model = grt::io::read_model(a.model);
  json model_doc;
  json transform_doc;
  grt::AnyModel image = model;
  if (a.op == "induce-ds") {
    if (const auto* m = std::get_if<grt::TwoByTwoModel>(&model)) {
      auto t = grt::induce_ds(*m);
      image = t.model;
      model_doc = grt::io::to_json(image);
      transform_doc = grt::io::to_json(t.transform);
    } else if (const auto* mb = std::get_if<grt::MultiBoundModel>(&model)) {
      auto t = grt::induce_ds(*mb);
      image = t.model;
      model_doc = grt::io::to_json(image);
      transform_doc = grt::io::to_json(t.transform);
    } else {
      const auto& g = std::get<grt::GrtWindModel>(model);
      const auto ds = grt::subject_specific_induce_ds(g);
      json models = json::array();
      json transforms = json::array();
      for (std::size_t k = 0; k < ds.models.size(); ++k) {
        models.push_back(grt::io::to_json(grt::AnyModel(ds.models[k])));
        transforms.push_back(grt::io::to_json(ds.transforms[k]));
      }
      model_doc = {{"schema_version", grt::io::kSchemaVersion},
                   {"class", "grtwind_subject_images"},
                   {"universal_perception_violated", grt::universal_perception_violated(ds.models)},
                   {"subject_models", models}};
      transform_doc = {{"schema_version", grt::io::kSchemaVersion}, {"subject_transforms", transforms}};
      if (!a.ellipses.empty()) emit_text(grt::io::subject_ellipse_csv(ds.models), a.ellipses);
      emit(model_doc, a.out);
      if (!a.transform_out.empty()) emit(transform_doc, a.transform_out);
      return 0;
    }
  } else if (a.op == "normalize") {
    const auto* m = std::get_if<grt::TwoByTwoModel>(&model);
    if (!m) throw grt::DomainError("normalize is defined for 2x2 models only");
    auto n = grt::normalize_model(*m);
    image = n.model;
    model_doc = grt::io::to_json(image);
    json transforms = json::array();
    for (const auto& t : n.transforms) transforms.push_back(grt::io::to_json(t));
    transform_doc = {{"schema_version", grt::io::kSchemaVersion}, {"distribution_transforms", transforms}};
  } else {
    throw grt::ParseError("unknown --op '" + a.op + "' (expected induce-ds or normalize)");
  }
  emit(model_doc, a.out);
  if (!a.transform_out.empty()) emit(transform_doc, a.transform_out);
  if (!a.ellipses.empty()) emit_text(grt::io::ellipse_csv(image), a.ellipses);
  return 0;
}

struct AuditArgs {
  std::string cls = "2x2";
  std::string levels = "3x3";
  std::size_t subjects = 3;
  std::string model;
  bool json_output = false;
};

int run_audit(const AuditArgs& a) {
  std::vector<grt::DofReport> reports;
  if (!a.model.empty()) {
    const auto m = grt::io::read_model(a.model);
    reports.push_back(grt::audit(grt::model_class(m), grt::model_size(m), grt::constraints_of(m)));
  } else {
    const auto cls = parse_class(a.cls);
    if (cls == grt::ModelClass::TwoByTwo) {
      for (const auto& r : grt::audit_two_by_two_conventions()) reports.push_back(r);
    } else {
      const Levels lv = parse_levels(a.levels);
      reports.push_back(grt::audit(cls, {lv.x, lv.y, a.subjects}, grt::default_scheme(cls)));
    }
  }
  if (a.json_output) {
    if (reports.size() == 1) {
      std::cout << grt::io::to_json(reports.front()).dump(2) << '\n';
    } else {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(grt::io::to_json(r));
      std::cout << json{{"schema_version", grt::io::kSchemaVersion}, {"conventions", arr}}.dump(2)
                << '\n';
    }
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i > 0) std::cout << '\n';
      std::cout << grt::io::format_report(reports[i]);
    }
  }
  return 0;
}

struct CheckArgs {
  std::string model;
  std::string data;
  std::string out;
  bool json_output = false;
};

int run_equiv_check(const CheckArgs& a) {
  const auto cert = grt::equivalence_certificate(grt::io::read_model(a.model));
  if (a.json_output || !a.out.empty()) {
    emit(grt::io::to_json(cert), a.out);
  } else {
    for (const auto& t : cert.twins) {
      std::printf("%-22s %-8s discrepancy %.3e%s\n", t.kind.c_str(),
                  t.subject ? ("s" + std::to_string(*t.subject + 1)).c_str() : "",
                  t.discrepancy, t.identity ? "  (identity)" : "");
    }
    std::printf("max discrepancy %.3e (%s)\n", cert.max_discrepancy, cert.passed ? "pass" : "FAIL");
    if (!cert.twins.empty() && cert.twins.front().subject) {
      std::printf("universal perception violated in image: %s\n",
                  cert.universal_perception_violated ? "yes" : "no");
    }
  }
  return cert.passed ? 0 : kExitDomain;
}

int run_twin_check(const CheckArgs& a) {
  const auto model = grt::io::read_model(a.model);
  const auto data = grt::io::read_data(a.data);
  const auto r = grt::likelihood_twin_check(model, data);
  const bool passed = std::abs(r.delta) < grt::kTwinLikelihoodTolerance;
  if (a.json_output || !a.out.empty()) {
    emit(grt::io::to_json(r), a.out);
  } else {
    std::printf("original log-likelihood %.12g\n", r.original_log_likelihood);
    std::printf("twin log-likelihood     %.12g\n", r.twin_log_likelihood);
    std::printf("delta                   %.3e (%s)\n", r.delta, passed ? "pass" : "FAIL");
    for (std::size_t k = 0; k < r.per_subject_delta.size(); ++k) {
      std::printf("  subject %-3zu delta %.3e\n", k + 1, r.per_subject_delta[k]);
    }
    if (r.normalized_delta) std::printf("normalized image delta  %.3e\n", *r.normalized_delta);
  }
  return passed ? 0 : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian GRT toolkit: fit, simulate, transform and audit GRT models"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit to confusion-matrix data");
  fit->add_option("--model", fa.model, "model JSON giving class, size and constraints");
  fit->add_option("--class", fa.cls, "2x2 | concurrent | nxm | grtwind (when no --model)");
  fit->add_option("--levels", fa.levels, "response levels NxM for multi-bound classes");
  fit->add_option("--data", fa.data, "CSV file, or directory of subject_<k>.csv")->required();
  fit->add_option("--out", fa.out, "FitResult JSON path ('-' for stdout)");
  fit->add_option("--model-out", fa.model_out, "fitted model JSON path");
  fit->add_option("--restarts", fa.restarts, "number of starts")->capture_default_str();
  fit->add_option("--max-iterations", fa.max_iterations, "simplex iterations per start")->capture_default_str();
  fit->add_option("--tolerance", fa.tolerance, "simplex size tolerance")->capture_default_str();
  fit->add_option("--seed", fa.seed)->capture_default_str();
  fit->add_flag("--start-from-model", fa.start_from_model, "first start at the --model parameters");
  fit->add_flag("--json", fa.json_output);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "sample confusion matrices from a model");
  sim->add_option("--model", sa.model)->required();
  sim->add_option("--trials", sa.trials, "trials per stimulus")->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed)->capture_default_str();
  sim->add_option("--out", sa.out, "CSV path, or directory for GRTwIND");

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "apply an equivalence transform");
  tr->add_option("--model", ta.model)->required();
  tr->add_option("--op", ta.op, "induce-ds | normalize")->capture_default_str();
  tr->add_option("--out", ta.out, "transformed model JSON path ('-' for stdout)");
  tr->add_option("--transform-out", ta.transform_out, "affine transform JSON path");
  tr->add_option("--emit-ellipses", ta.ellipses, "CSV of equal-likelihood contour points");

  AuditArgs aa;
  auto* au = app.add_subcommand("audit", "degrees-of-freedom audit");
  au->add_option("--class", aa.cls, "2x2 | concurrent | nxm | grtwind")->capture_default_str();
  au->add_option("--levels", aa.levels, "response levels NxM")->capture_default_str();
  au->add_option("--subjects", aa.subjects, "GRTwIND subject count")->capture_default_str();
  au->add_option("--model", aa.model, "audit the class, size and constraints of a model file");
  au->add_flag("--json", aa.json_output);

  CheckArgs ea;
  auto* eq = app.add_subcommand("equiv-check", "probability discrepancy of the equivalence twins");
  eq->add_option("--model", ea.model)->required();
  eq->add_option("--out", ea.out);
  eq->add_flag("--json", ea.json_output);

  CheckArgs wa;
  auto* tw = app.add_subcommand("twin-check", "log-likelihood of a model and its DS twin");
  tw->add_option("--model", wa.model)->required();
  tw->add_option("--data", wa.data)->required();
  tw->add_option("--out", wa.out);
  tw->add_flag("--json", wa.json_output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitIo;
  }

  try {
    if (*fit) return run_fit(fa);
    if (*sim) return run_simulate(sa);
    if (*tr) return run_transform(ta);
    if (*au) return run_audit(aa);
    if (*eq) return run_equiv_check(ea);
    if (*tw) return run_twin_check(wa);
  } catch (const grt::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const grt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const grt::IdentifiabilityError& e) {
    std::cerr << "identifiability error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const grt::InvariantError& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return kExitDomain;
  } catch (const grt::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExitDomain;
  } catch (const grt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return 0;
}
