#include "core/model_spec.hpp"

namespace fb {

std::string term_kind_name(TermKind k) {
  switch (k) {
    case TermKind::FunctionalIntercept: return "functional_intercept";
    case TermKind::StepIntercept: return "step_intercept";
    case TermKind::LinearScalar: return "linear_scalar";
    case TermKind::SmoothScalar: return "smooth_scalar";
    case TermKind::GroupIntercept: return "group_intercept";
    case TermKind::GroupLinear: return "group_linear";
    case TermKind::LinearInteraction: return "linear_interaction";
    case TermKind::SmoothInteraction: return "smooth_interaction";
    case TermKind::FunctionalLinear: return "functional_linear";
    case TermKind::Historical: return "historical";
    case TermKind::Concurrent: return "concurrent";
  }
  throw ConfigError("invalid term kind");
}

TermKind term_kind_from_name(const std::string& name) {
  if (name == "functional_intercept") return TermKind::FunctionalIntercept;
  if (name == "step_intercept") return TermKind::StepIntercept;
  if (name == "linear_scalar") return TermKind::LinearScalar;
  if (name == "smooth_scalar") return TermKind::SmoothScalar;
  if (name == "group_intercept") return TermKind::GroupIntercept;
  if (name == "group_linear") return TermKind::GroupLinear;
  if (name == "linear_interaction") return TermKind::LinearInteraction;
  if (name == "smooth_interaction") return TermKind::SmoothInteraction;
  if (name == "functional_linear") return TermKind::FunctionalLinear;
  if (name == "historical") return TermKind::Historical;
  if (name == "concurrent") return TermKind::Concurrent;
  throw ConfigError("unknown term kind '" + name + "'");
}

std::string TermDescriptor::display_label() const {
  if (!label.empty()) return label;
  std::string s = term_kind_name(kind);
  for (const auto& c : covariates) s += "_" + c;
  return s;
}

}  // namespace fb
