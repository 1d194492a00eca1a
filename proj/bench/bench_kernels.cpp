// Serial vs OpenMP timings for the batch kernels and the per-subject GRTwIND
// transform. Usage: bench_kernels [batch_size] [repetitions]
// Thread count follows GRT_KIT_THREADS / OMP_NUM_THREADS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "grt/fitting.hpp"
#include "grt/grtwind.hpp"
#include "grt/kernels.hpp"

using namespace grt;

namespace {

std::mt19937_64 rng(2024);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

PerceptualDistribution random_distribution() {
  return {Vec2(uniform(-2, 2), uniform(-2, 2)),
          Covariance::from_correlation(std::sqrt(uniform(0.25, 4)), std::sqrt(uniform(0.25, 4)), uniform(-0.9, 0.9))};
}

std::pair<double, double> tilted_slopes() {
  const double phi = uniform(-std::numbers::pi / 4, std::numbers::pi / 4);
  const double omega = uniform(std::numbers::pi / 3, 2 * std::numbers::pi / 3);
  return {1.0 / std::tan(phi + omega), std::tan(phi)};
}

SingleSubjectModel random_model(std::size_t i) {
  const auto [bx, by] = tilted_slopes();
  if (i % 2 == 0) {
    return TwoByTwoModel({random_distribution(), random_distribution(), random_distribution(), random_distribution()},
                         LinearBound::x_bound(uniform(-0.5, 0.5), bx), LinearBound::y_bound(uniform(-0.5, 0.5), by));
  }
  std::vector<PerceptualDistribution> d;
  for (int s = 0; s < 9; ++s) d.push_back(random_distribution());
  return MultiBoundModel(MultiBoundKind::NxMIdentification, 3, 3, std::move(d),
                         {LinearBound::x_bound(-0.5, bx), LinearBound::x_bound(0.5, bx)},
                         {LinearBound::y_bound(-0.5, by), LinearBound::y_bound(0.5, by)});
}

double best_of(int reps, const std::function<void()>& f) {
  double best = INFINITY;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-34s %12.3f %12.3f %8.2fx\n", name, 1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 2000;
  int reps = 5;
  try {
    if (argc > 1) n = std::stoul(argv[1]);
    if (argc > 2) reps = std::stoi(argv[2]);
  } catch (const std::exception&) {
    std::fprintf(stderr, "usage: %s [batch_size] [repetitions]\n", argv[0]);
    return 2;
  }
  if (n == 0 || reps < 1) {
    std::fprintf(stderr, "usage: %s [batch_size] [repetitions]\n", argv[0]);
    return 2;
  }

  std::vector<SingleSubjectModel> models;
  std::vector<ConfusionMatrix> data;
  for (std::size_t i = 0; i < n; ++i) {
    models.push_back(random_model(i));
    data.push_back(simulate(models.back(), 200, i));
  }
  std::vector<SubjectParams> subjects;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [bx, by] = tilted_slopes();
    subjects.emplace_back(uniform(0.5, 2), uniform(0.2, 0.8), LinearBound::x_bound(uniform(-0.5, 0.5), bx),
                          LinearBound::y_bound(uniform(-0.5, 0.5), by));
  }
  const GrtWindModel group({random_distribution(), random_distribution(), random_distribution(), random_distribution()},
                           std::move(subjects));

  std::printf("batch of %zu models, %d repetitions (best time), %d threads\n", n, reps, thread_limit());
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");
  volatile double sink = 0.0;
  for (auto route : {IntegrationRoute::TransformThenRectangle, IntegrationRoute::ObliqueCoordinates}) {
    const bool oblique = route == IntegrationRoute::ObliqueCoordinates;
    row(oblique ? "probabilities (oblique)" : "probabilities (transform)",
        best_of(reps, [&] { sink = sink + batch_probabilities_serial(models, route)[0](0, 0); }),
        best_of(reps, [&] { sink = sink + batch_probabilities(models, route)[0](0, 0); }));
  }
  row("log-likelihood",
      best_of(reps, [&] { sink = sink + batch_log_likelihood_serial(models, data)[0]; }),
      best_of(reps, [&] { sink = sink + batch_log_likelihood(models, data)[0]; }));
  row("GRTwIND subject transforms",
      best_of(reps, [&] { sink = sink + subject_specific_induce_ds_serial(group).models.size(); }),
      best_of(reps, [&] { sink = sink + subject_specific_induce_ds(group).models.size(); }));

  // same values either way
  const bool same = batch_log_likelihood(models, data) == batch_log_likelihood_serial(models, data) &&
                    subject_specific_induce_ds(group).models == subject_specific_induce_ds_serial(group).models;
  std::printf("parallel results identical to serial: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
