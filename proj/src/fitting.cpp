#include "grt/fitting.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

#include "grt/errors.hpp"
#include "grt/kernels.hpp"
#include "parameter_layout.hpp"

namespace grt {

double log_likelihood(const SingleSubjectModel& model, const ConfusionMatrix& data,
                      IntegrationRoute route) {
  return multinomial_log_likelihood(response_probabilities(model, route), data);
}

double log_likelihood(const GrtWindModel& model, std::span<const ConfusionMatrix> data,
                      IntegrationRoute route) {
  if (data.size() != model.subject_count()) {
    throw ShapeError("GRTwIND model has " + std::to_string(model.subject_count()) +
                     " subjects but " + std::to_string(data.size()) + " data matrices were given");
  }
  std::vector<SingleSubjectModel> subjects;
  subjects.reserve(model.subject_count());
  for (std::size_t k = 0; k < model.subject_count(); ++k) subjects.emplace_back(subject_model(model, k));
  const auto per = batch_log_likelihood(subjects, data, route);
  return std::accumulate(per.begin(), per.end(), 0.0);
}

double log_likelihood(const AnyModel& model, std::span<const ConfusionMatrix> data,
                      IntegrationRoute route) {
  if (const auto* g = std::get_if<GrtWindModel>(&model)) return log_likelihood(*g, data, route);
  if (data.size() != 1) throw ShapeError("single-subject models take exactly one data matrix");
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    return log_likelihood(SingleSubjectModel(*m), data[0], route);
  }
  return log_likelihood(SingleSubjectModel(std::get<MultiBoundModel>(model)), data[0], route);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::Stalled:
      return "stalled";
    case Termination::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

namespace {

constexpr double kPenalty = 1e100;

void gsl_quiet() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

std::uint64_t total_trials(std::span<const ConfusionMatrix> data) {
  std::uint64_t t = 0;
  for (const auto& d : data) t += d.total();
  return t;
}

void check_shapes(const detail::ParameterLayout& layout, std::span<const ConfusionMatrix> data) {
  if (data.size() != layout.subjects()) {
    throw ShapeError("expected " + std::to_string(layout.subjects()) + " data matrices, got " +
                     std::to_string(data.size()));
  }
  for (const auto& d : data) {
    if (d.stimuli() != layout.stimuli() || d.responses() != layout.responses()) {
      throw ShapeError("data matrix is " + std::to_string(d.stimuli()) + "x" +
                       std::to_string(d.responses()) + ", the model class needs " +
                       std::to_string(layout.stimuli()) + "x" + std::to_string(layout.responses()));
    }
  }
}

// Clamped cumulative response proportions on one dimension: cum[s][i] = P(level <= i | s).
std::vector<std::vector<double>> cumulative(const ConfusionMatrix& d, std::size_t rx,
                                            std::size_t ry, Dimension dim) {
  const std::size_t levels = dim == Dimension::X ? rx : ry;
  std::vector<std::vector<double>> out(d.stimuli(), std::vector<double>(levels - 1, 0.0));
  for (std::size_t s = 0; s < d.stimuli(); ++s) {
    std::vector<double> marginal(levels, 0.0);
    for (std::size_t i = 0; i < rx; ++i) {
      for (std::size_t j = 0; j < ry; ++j) {
        marginal[dim == Dimension::X ? i : j] += static_cast<double>(d.count(s, i * ry + j));
      }
    }
    const double total = static_cast<double>(d.row_total(s));
    double acc = 0.0;
    for (std::size_t l = 0; l + 1 < levels; ++l) {
      acc += marginal[l];
      out[s][l] = std::clamp(acc / total, 1e-3, 1.0 - 1e-3);
    }
  }
  return out;
}

// Per-stimulus z-score means and shared criteria on one dimension.
void zscores(const std::vector<std::vector<double>>& cum, std::vector<double>& means,
             std::vector<double>& cuts) {
  const std::size_t stimuli = cum.size();
  const std::size_t ncut = cum.front().size();
  cuts.assign(ncut, 0.0);
  for (std::size_t l = 0; l < ncut; ++l) {
    double pooled = 0.0;
    for (std::size_t s = 0; s < stimuli; ++s) pooled += cum[s][l];
    cuts[l] = gsl_cdf_ugaussian_Pinv(pooled / static_cast<double>(stimuli));
    if (l > 0) cuts[l] = std::max(cuts[l], cuts[l - 1] + 0.05);
  }
  means.assign(stimuli, 0.0);
  for (std::size_t s = 0; s < stimuli; ++s) {
    double m = 0.0;
    for (std::size_t l = 0; l < ncut; ++l) m += cuts[l] - gsl_cdf_ugaussian_Pinv(cum[s][l]);
    means[s] = m / static_cast<double>(ncut);
  }
}

ConfusionMatrix pooled(std::span<const ConfusionMatrix> data) {
  std::vector<std::uint64_t> counts(data[0].counts().begin(), data[0].counts().end());
  for (const auto& d : data.subspan(1)) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += d.counts()[i];
  }
  return {data[0].stimuli(), data[0].responses(), std::move(counts)};
}

AnyModel initial_model(const detail::ParameterLayout& layout,
                       std::span<const ConfusionMatrix> data) {
  const std::size_t rx = layout.size().x_levels;
  const std::size_t ry = layout.size().y_levels;
  const ConfusionMatrix all = pooled(data);
  std::vector<double> mx, my, cx, cy;
  zscores(cumulative(all, rx, ry, Dimension::X), mx, cx);
  zscores(cumulative(all, rx, ry, Dimension::Y), my, cy);

  const auto& scheme = layout.scheme();
  Vec2 shift = Vec2::Zero();
  if (scheme.location_fix.kind == LocationFix::Kind::MeanAtOrigin) {
    shift = Vec2(mx[scheme.location_fix.stimulus], my[scheme.location_fix.stimulus]);
  } else if (scheme.location_fix.kind == LocationFix::Kind::BoundIntersectionAtOrigin) {
    shift = Vec2(cx[0], cy[0]);
  }
  // With kappa = 1 and lambda = 1/2 a unit group variance becomes 2 at the subject level.
  const double scale = layout.model_class() == ModelClass::GrtWind ? std::sqrt(2.0) : 1.0;

  std::vector<PerceptualDistribution> dists;
  const auto& slots = layout.distributions();
  for (std::size_t s = 0; s < layout.stimuli(); ++s) {
    const double x = slots[s].mean_x_free ? (mx[s] - shift.x()) * scale : 0.0;
    const double y = slots[s].mean_y_free ? (my[s] - shift.y()) * scale : 0.0;
    dists.emplace_back(Vec2(x, y), Covariance{1.0, 0.0, 1.0});
  }

  if (layout.model_class() == ModelClass::GrtWind) {
    std::vector<SubjectParams> subjects;
    for (const auto& d : data) {
      std::vector<double> sx, sy, kx, ky;
      zscores(cumulative(d, rx, ry, Dimension::X), sx, kx);
      zscores(cumulative(d, rx, ry, Dimension::Y), sy, ky);
      // Criterion relative to the pooled means: c = mean_s(mu_s + (c_k - mu_k,s)).
      double ax = 0.0, ay = 0.0;
      for (std::size_t s = 0; s < 4; ++s) {
        ax += mx[s] + (kx[0] - sx[s]);
        ay += my[s] + (ky[0] - sy[s]);
      }
      ax = (ax / 4.0 - shift.x()) * scale;
      ay = (ay / 4.0 - shift.y()) * scale;
      subjects.emplace_back(1.0, 0.5, LinearBound::x_bound(ax), LinearBound::y_bound(ay));
    }
    return GrtWindModel({dists[0], dists[1], dists[2], dists[3]}, std::move(subjects), scheme);
  }

  std::vector<LinearBound> bx, by;
  for (double c : cx) bx.push_back(LinearBound::x_bound(c - shift.x()));
  for (double c : cy) by.push_back(LinearBound::y_bound(c - shift.y()));
  if (layout.model_class() == ModelClass::TwoByTwo) {
    return TwoByTwoModel({dists[0], dists[1], dists[2], dists[3]}, bx[0], by[0], scheme);
  }
  const auto kind = layout.model_class() == ModelClass::NxM ? MultiBoundKind::NxMIdentification
                                                            : MultiBoundKind::ConcurrentRatings;
  return MultiBoundModel(kind, layout.stimulus_x_levels(), layout.stimulus_y_levels(),
                         std::move(dists), std::move(bx), std::move(by), scheme);
}

struct Objective {
  const detail::ParameterLayout* layout;
  std::span<const ConfusionMatrix> data;

  double operator()(const std::vector<double>& theta) const {
    try {
      const double ll = log_likelihood(layout->decode(theta), data);
      return std::isfinite(ll) ? -ll : kPenalty;
    } catch (const std::exception&) {
      return kPenalty;
    }
  }
};

double gsl_objective(const gsl_vector* x, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  std::vector<double> theta(x->size);
  for (std::size_t i = 0; i < x->size; ++i) theta[i] = gsl_vector_get(x, i);
  return (*obj)(theta);
}

struct RestartResult {
  std::vector<double> theta;
  double nll = kPenalty;
  bool converged = false;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIterations;
};

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

RestartResult run_simplex(const Objective& objective, const std::vector<double>& start,
                          const FitOptions& options) {
  const std::size_t n = start.size();
  RestartResult out;
  out.theta = start;
  if (n == 0) {
    out.nll = objective(start);
    out.converged = true;
    out.termination = Termination::Converged;
    return out;
  }
  std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, GslVectorDeleter> step(gsl_vector_alloc(n));
  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));

  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &gsl_objective;
  fn.params = const_cast<Objective*>(&objective);

  // Near the optimum of a large data set the objective is flat to machine
  // precision well before the simplex reaches `tolerance`; a round is then
  // stopped as stalled once its best value has not moved for kStallIterations.
  // A high-dimensional simplex also tends to collapse before it reaches the
  // optimum, so it is rebuilt around the best point until a round no longer helps.
  constexpr std::size_t kStallIterations = 500;
  constexpr double kRoundGain = 1e-9;
  out.nll = objective(start);
  for (std::size_t round = 0; out.iterations < options.max_iterations; ++round) {
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, out.theta[i]);
    gsl_vector_set_all(step.get(), round == 0 ? 0.5 : 0.1);
    if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get()) != GSL_SUCCESS) break;

    // minimum() is not initialized until the first iterate
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t since_improvement = 0;
    Termination termination = Termination::MaxIterations;
    while (out.iterations < options.max_iterations) {
      ++out.iterations;
      if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) {
        termination = Termination::Stalled;
        break;
      }
      if (gsl_multimin_fminimizer_size(s.get()) < options.tolerance) {
        termination = Termination::Converged;
        break;
      }
      const double value = gsl_multimin_fminimizer_minimum(s.get());
      if (value < best_value) {
        best_value = value;
        since_improvement = 0;
      } else if (++since_improvement == kStallIterations) {
        termination = Termination::Stalled;
        break;
      }
    }
    const double value = gsl_multimin_fminimizer_minimum(s.get());
    const double gain = out.nll - value;
    if (value < out.nll) {
      const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
      for (std::size_t i = 0; i < n; ++i) out.theta[i] = gsl_vector_get(best, i);
      out.nll = value;
    }
    out.termination = termination;
    out.converged = termination == Termination::Converged;
    if (round > 0 && !(gain > kRoundGain)) break;
  }
  return out;
}

double gradient_norm(const Objective& objective, const std::vector<double>& theta) {
  constexpr double h = 1e-5;
  double sq = 0.0;
  std::vector<double> t = theta;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = theta[i] + h;
    const double up = objective(t);
    t[i] = theta[i] - h;
    const double down = objective(t);
    t[i] = theta[i];
    const double g = (up - down) / (2.0 * h);
    sq += g * g;
  }
  return std::sqrt(sq);
}

}  // namespace

FitResult fit(std::span<const ConfusionMatrix> data, ModelClass cls, ModelSize size,
              const ConstraintScheme& scheme, const FitOptions& options) {
  gsl_quiet();
  if (data.empty()) throw ShapeError("no data matrices");
  if (cls == ModelClass::GrtWind) size.subjects = data.size();
  if (options.restarts == 0) throw DomainError("restarts must be at least 1");
  if (!(options.tolerance > 0.0)) throw DomainError("tolerance must be positive");

  const detail::ParameterLayout layout(cls, size, scheme);
  check_shapes(layout, data);
  DofReport report = audit(cls, size, scheme);
  if (!report.identifiable_under_scheme) {
    throw IdentifiabilityError("model is not identifiable under the constraint scheme: " +
                                   report.notes,
                               report);
  }

  const Objective objective{&layout, data};
  const std::vector<double> theta0 =
      options.start ? layout.encode(*options.start) : layout.encode(initial_model(layout, data));

  std::vector<RestartResult> results(options.restarts);
  std::vector<std::exception_ptr> errors(options.restarts);
  const auto count = static_cast<std::ptrdiff_t>(options.restarts);
#pragma omp parallel for schedule(dynamic) num_threads(thread_limit())
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      std::vector<double> start = theta0;
      if (k > 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                          static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(k)};
        std::mt19937_64 gen(seq);
        std::normal_distribution<double> jitter(0.0, options.jitter);
        for (double& v : start) v += jitter(gen);
      }
      results[k] = run_simplex(objective, start, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].nll < results[best].nll) best = k;
  }
  if (!(results[best].nll < kPenalty)) {
    throw OptimizationError("every restart ended at a non-finite likelihood");
  }

  FitResult out{layout.decode(results[best].theta), 0.0, 0, 0.0, 0.0, false, 0, 0.0, 0, 0, Termination::MaxIterations, {}};
  out.log_likelihood = log_likelihood(out.model, data);
  out.n_free_parameters = static_cast<long>(layout.dimension());
  const double k = static_cast<double>(out.n_free_parameters);
  out.aic = 2.0 * k - 2.0 * out.log_likelihood;
  out.bic = k * std::log(static_cast<double>(total_trials(data))) - 2.0 * out.log_likelihood;
  out.converged = results[best].converged;
  out.n_restarts_used = results.size();
  out.gradient_norm_at_solution = gradient_norm(objective, results[best].theta);
  out.best_restart = best;
  out.iterations = results[best].iterations;
  out.termination = results[best].termination;
  out.audit = std::move(report);
  return out;
}

namespace {

ConfusionMatrix sample(const ProbabilityMatrix& p, std::size_t sx, std::size_t sy, std::size_t rx,
                       std::size_t ry, std::uint64_t trials, std::mt19937_64& gen) {
  const auto rows = static_cast<std::size_t>(p.rows());
  const auto cols = static_cast<std::size_t>(p.cols());
  std::vector<std::uint64_t> counts(rows * cols, 0);
  for (std::size_t s = 0; s < rows; ++s) {
    std::uint64_t left = trials;
    double mass = 1.0;
    for (std::size_t r = 0; r < cols && left > 0; ++r) {
      const double q = p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r));
      std::uint64_t n = left;
      if (r + 1 < cols) {
        const double prob = mass > 0.0 ? std::clamp(q / mass, 0.0, 1.0) : 1.0;
        std::binomial_distribution<std::uint64_t> draw(left, prob);
        n = draw(gen);
      }
      counts[s * cols + r] = n;
      left -= n;
      mass -= q;
    }
  }
  return {rows, cols, std::move(counts), grid_labels(sx, sy, true), grid_labels(rx, ry, false)};
}

std::mt19937_64 stream(std::uint64_t seed, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  return std::mt19937_64(seq);
}

}  // namespace

ConfusionMatrix simulate(const SingleSubjectModel& model, std::uint64_t trials_per_stimulus,
                         std::uint64_t seed) {
  if (trials_per_stimulus == 0) throw DomainError("trials per stimulus must be positive");
  auto gen = stream(seed, 0);
  const auto p = response_probabilities(model);
  if (const auto* m = std::get_if<MultiBoundModel>(&model)) {
    return sample(p, m->stimulus_x_levels(), m->stimulus_y_levels(), m->response_x_levels(),
                  m->response_y_levels(), trials_per_stimulus, gen);
  }
  return sample(p, 2, 2, 2, 2, trials_per_stimulus, gen);
}

std::vector<ConfusionMatrix> simulate(const GrtWindModel& model, std::uint64_t trials_per_stimulus,
                                      std::uint64_t seed) {
  if (trials_per_stimulus == 0) throw DomainError("trials per stimulus must be positive");
  std::vector<ConfusionMatrix> out;
  out.reserve(model.subject_count());
  for (std::size_t k = 0; k < model.subject_count(); ++k) {
    auto gen = stream(seed, k);
    out.push_back(sample(grtwind_response_probabilities(model, k), 2, 2, 2, 2,
                         trials_per_stimulus, gen));
  }
  return out;
}

std::vector<ConfusionMatrix> simulate(const AnyModel& model, std::uint64_t trials_per_stimulus,
                                      std::uint64_t seed) {
  if (const auto* g = std::get_if<GrtWindModel>(&model)) {
    return simulate(*g, trials_per_stimulus, seed);
  }
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    return {simulate(SingleSubjectModel(*m), trials_per_stimulus, seed)};
  }
  return {simulate(SingleSubjectModel(std::get<MultiBoundModel>(model)), trials_per_stimulus, seed)};
}

TwinLikelihoodReport likelihood_twin_check(const AnyModel& model,
                                           std::span<const ConfusionMatrix> data) {
  constexpr auto oblique = IntegrationRoute::ObliqueCoordinates;
  TwinLikelihoodReport r;
  if (const auto* g = std::get_if<GrtWindModel>(&model)) {
    if (data.size() != g->subject_count()) {
      throw ShapeError("one data matrix per subject is required");
    }
    const auto image = subject_specific_induce_ds(*g);
    r.identity_twin = true;
    for (std::size_t k = 0; k < g->subject_count(); ++k) {
      const double orig = log_likelihood(SingleSubjectModel(subject_model(*g, k)), data[k], oblique);
      const double twin = log_likelihood(SingleSubjectModel(image.models[k]), data[k]);
      r.original_log_likelihood += orig;
      r.twin_log_likelihood += twin;
      r.per_subject_delta.push_back(twin - orig);
      r.identity_twin = r.identity_twin && image.transforms[k].is_identity();
    }
    r.delta = r.twin_log_likelihood - r.original_log_likelihood;
    return r;
  }

  if (data.size() != 1) throw ShapeError("single-subject models take exactly one data matrix");
  if (const auto* m = std::get_if<TwoByTwoModel>(&model)) {
    const auto ds = induce_ds(*m);
    r.original_log_likelihood = log_likelihood(SingleSubjectModel(*m), data[0], oblique);
    r.twin_log_likelihood = log_likelihood(SingleSubjectModel(ds.model), data[0]);
    r.identity_twin = ds.transform.is_identity();
    const auto norm = normalize_model(ds.model);
    r.normalized_delta =
        log_likelihood(SingleSubjectModel(norm.model), data[0]) - r.original_log_likelihood;
  } else {
    const auto& mb = std::get<MultiBoundModel>(model);
    const auto ds = induce_ds(mb);
    r.original_log_likelihood = log_likelihood(SingleSubjectModel(mb), data[0], oblique);
    r.twin_log_likelihood = log_likelihood(SingleSubjectModel(ds.model), data[0]);
    r.identity_twin = ds.transform.is_identity();
  }
  r.delta = r.twin_log_likelihood - r.original_log_likelihood;
  return r;
}

}  // namespace grt
