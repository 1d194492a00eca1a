#include "grt/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include "grt/errors.hpp"

namespace grt {

int thread_limit() {
  if (const char* env = std::getenv("GRT_KIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, omp_get_max_threads());
}

double multinomial_log_likelihood(const ProbabilityMatrix& p, const ConfusionMatrix& data) {
  if (static_cast<std::size_t>(p.rows()) != data.stimuli() ||
      static_cast<std::size_t>(p.cols()) != data.responses()) {
    throw ShapeError("data is " + std::to_string(data.stimuli()) + "x" +
                     std::to_string(data.responses()) + " but the model predicts " +
                     std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
  }
  double ll = 0.0;
  for (std::size_t s = 0; s < data.stimuli(); ++s) {
    for (std::size_t r = 0; r < data.responses(); ++r) {
      const auto n = data.count(s, r);
      if (n == 0) continue;
      const double q = std::max(p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r)),
                                kProbabilityFloor);
      ll += static_cast<double>(n) * std::log(q);
    }
  }
  return ll;
}

namespace {

template <class F>
void parallel_for(std::size_t n, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_limit())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw ShapeError("model and data lists differ in length");
}

}  // namespace

std::vector<ProbabilityMatrix> batch_probabilities(std::span<const SingleSubjectModel> models,
                                                   IntegrationRoute route) {
  std::vector<ProbabilityMatrix> out(models.size());
  parallel_for(models.size(), [&](std::size_t i) { out[i] = response_probabilities(models[i], route); });
  return out;
}

std::vector<ProbabilityMatrix> batch_probabilities_serial(std::span<const SingleSubjectModel> models,
                                                          IntegrationRoute route) {
  std::vector<ProbabilityMatrix> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(response_probabilities(m, route));
  return out;
}

std::vector<double> batch_log_likelihood(std::span<const SingleSubjectModel> models,
                                         std::span<const ConfusionMatrix> data,
                                         IntegrationRoute route) {
  require_same_length(models.size(), data.size());
  std::vector<double> out(models.size());
  parallel_for(models.size(), [&](std::size_t i) {
    out[i] = multinomial_log_likelihood(response_probabilities(models[i], route), data[i]);
  });
  return out;
}

std::vector<double> batch_log_likelihood_serial(std::span<const SingleSubjectModel> models,
                                                std::span<const ConfusionMatrix> data,
                                                IntegrationRoute route) {
  require_same_length(models.size(), data.size());
  std::vector<double> out;
  out.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    out.push_back(multinomial_log_likelihood(response_probabilities(models[i], route), data[i]));
  }
  return out;
}

}  // namespace grt
