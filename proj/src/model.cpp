#include "grt/model.hpp"

namespace grt {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

ModelClass model_class(const AnyModel& model) {
  return std::visit(overloaded{
                        [](const TwoByTwoModel&) { return ModelClass::TwoByTwo; },
                        [](const MultiBoundModel& m) {
                          return m.kind() == MultiBoundKind::ConcurrentRatings
                                     ? ModelClass::ConcurrentRatings
                                     : ModelClass::NxM;
                        },
                        [](const GrtWindModel&) { return ModelClass::GrtWind; },
                    },
                    model);
}

ModelSize model_size(const AnyModel& model) {
  return std::visit(overloaded{
                        [](const TwoByTwoModel&) { return ModelSize{}; },
                        [](const MultiBoundModel& m) {
                          return ModelSize{m.response_x_levels(), m.response_y_levels(), 1};
                        },
                        [](const GrtWindModel& m) { return ModelSize{2, 2, m.subject_count()}; },
                    },
                    model);
}

const ConstraintScheme& constraints_of(const AnyModel& model) {
  return std::visit([](const auto& m) -> const ConstraintScheme& { return m.constraints(); },
                    model);
}

std::string_view to_string(ModelClass cls) {
  switch (cls) {
    case ModelClass::TwoByTwo:
      return "2x2";
    case ModelClass::ConcurrentRatings:
      return "concurrent";
    case ModelClass::NxM:
      return "nxm";
    case ModelClass::GrtWind:
      return "grtwind";
  }
  return "unknown";
}

}  // namespace grt
