#pragma once

// Which model quantities are free under a (class, size, scheme) triple, and the
// map between an unconstrained vector and a model. Shared by the audit and the
// fitter so the two always count the same parameters.

#include <cstddef>
#include <vector>

#include "grt/model.hpp"

namespace grt::detail {

struct DistributionSlots {
  bool mean_x_free = true;
  bool mean_y_free = true;
  bool unit_variances = false;  // only the correlation is free
};

class ParameterLayout {
 public:
  /// Throws DomainError on invalid class/size/scheme combinations.
  ParameterLayout(ModelClass cls, ModelSize size, ConstraintScheme scheme);

  ModelClass model_class() const { return cls_; }
  const ModelSize& size() const { return size_; }
  const ConstraintScheme& scheme() const { return scheme_; }

  std::size_t stimulus_x_levels() const { return stim_x_; }
  std::size_t stimulus_y_levels() const { return stim_y_; }
  std::size_t stimuli() const { return stim_x_ * stim_y_; }
  std::size_t responses() const { return size_.x_levels * size_.y_levels; }
  std::size_t subjects() const { return cls_ == ModelClass::GrtWind ? size_.subjects : 1; }
  const std::vector<DistributionSlots>& distributions() const { return dists_; }
  bool slopes_free() const { return slopes_free_; }
  bool first_intercepts_fixed() const { return first_intercepts_fixed_; }

  long perceptual() const;
  /// Conventional perceptual count (five covariance parameters per free n x m distribution).
  long perceptual_conventional() const;
  long decisional() const;
  long scaling() const;
  std::size_t dimension() const { return static_cast<std::size_t>(perceptual() + decisional() + scaling()); }

  AnyModel decode(const std::vector<double>& theta) const;
  /// Inverse of decode for a model of this class/size. Fixed quantities are ignored.
  std::vector<double> encode(const AnyModel& model) const;

 private:
  ModelClass cls_;
  ModelSize size_;
  ConstraintScheme scheme_;
  std::size_t stim_x_ = 2;
  std::size_t stim_y_ = 2;
  std::vector<DistributionSlots> dists_;
  bool slopes_free_ = false;
  bool first_intercepts_fixed_ = false;
};

double logistic(double t);
double logit(double p);

}  // namespace grt::detail
