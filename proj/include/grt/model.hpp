#pragma once

#include <string_view>
#include <variant>

#include "grt/core_model.hpp"
#include "grt/grtwind.hpp"

namespace grt {

/// Any single-subject model (one confusion matrix of data).
using SingleSubjectModel = std::variant<TwoByTwoModel, MultiBoundModel>;

/// Any model class the library handles.
using AnyModel = std::variant<TwoByTwoModel, MultiBoundModel, GrtWindModel>;

enum class ModelClass { TwoByTwo, ConcurrentRatings, NxM, GrtWind };

/// Grid and subject counts that, with the class, fix the shape of a model.
/// For concurrent ratings the levels are *response* levels per dimension; for
/// n x m they are both stimulus and response levels.
struct ModelSize {
  std::size_t x_levels = 2;
  std::size_t y_levels = 2;
  std::size_t subjects = 1;

  bool operator==(const ModelSize&) const = default;
};

ModelClass model_class(const AnyModel& model);
ModelSize model_size(const AnyModel& model);
const ConstraintScheme& constraints_of(const AnyModel& model);

std::string_view to_string(ModelClass cls);

}  // namespace grt
