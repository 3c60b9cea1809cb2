#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace webprobe {

enum class ErrorCode {
  invalid_argument,
  navigation_timeout,
  session_closed,
  element_not_found,
  not_interactable,
  form_not_found,
  login_rejected,
  budget_exhausted,
  no_candidates,
  unknown_state,
  unreachable_target,
  malformed_report,
  missing_description,
  backend_unavailable,
  empty_answer,
  not_found,
  malformed_definition,
  dangling_transition,
  config_error,
  missing_artifacts,
  missing_report,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type used throughout the core. The C API maps `code()` onto
/// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace webprobe
