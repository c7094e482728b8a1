#include "dqhelmert/solve_result.hpp"

namespace dqhelmert {

std::string_view ToString(Method method) {
  switch (method) {
    case Method::kDqaConstrained: return "dqa-constrained";
    case Method::kDqaSimplified: return "dqa-simplified";
    case Method::kQa: return "qa";
  }
  return "unknown";
}

std::string_view ToString(QuatForm form) {
  return form == QuatForm::kUnit ? "unit" : "scaled";
}

}  // namespace dqhelmert
