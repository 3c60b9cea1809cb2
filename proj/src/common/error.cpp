#include "common/error.hpp"

namespace webprobe {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::navigation_timeout: return "navigation-timeout";
    case ErrorCode::session_closed: return "session-closed";
    case ErrorCode::element_not_found: return "element-not-found";
    case ErrorCode::not_interactable: return "not-interactable";
    case ErrorCode::form_not_found: return "form-not-found";
    case ErrorCode::login_rejected: return "login-rejected";
    case ErrorCode::budget_exhausted: return "budget-exhausted";
    case ErrorCode::no_candidates: return "no-candidates";
    case ErrorCode::unknown_state: return "unknown-state";
    case ErrorCode::unreachable_target: return "unreachable-target";
    case ErrorCode::malformed_report: return "malformed-report";
    case ErrorCode::missing_description: return "missing-description";
    case ErrorCode::backend_unavailable: return "backend-unavailable";
    case ErrorCode::empty_answer: return "empty-answer";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::malformed_definition: return "malformed-definition";
    case ErrorCode::dangling_transition: return "dangling-transition";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::missing_artifacts: return "missing-artifacts";
    case ErrorCode::missing_report: return "missing-report";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace webprobe
