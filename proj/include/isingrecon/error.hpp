#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isingrecon {

enum class Errc {
  invalid_parameter,
  generation_failure,
  enumeration_too_large,
  out_of_regime,
  bound_inapplicable,
  singular_hessian,
  root_not_found,
  budget_exceeded,
  parse_error,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::generation_failure: return "generation-failure";
    case Errc::enumeration_too_large: return "enumeration-too-large";
    case Errc::out_of_regime: return "out-of-regime";
    case Errc::bound_inapplicable: return "bound-inapplicable";
    case Errc::singular_hessian: return "singular-hessian";
    case Errc::root_not_found: return "root-not-found";
    case Errc::budget_exceeded: return "budget-exceeded";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace isingrecon
