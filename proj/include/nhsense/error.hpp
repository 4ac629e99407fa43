#ifndef NHSENSE_ERROR_HPP
#define NHSENSE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhsense {

enum class ErrorKind {
  InvalidInput,
  InvalidParam,
  InvalidState,
  NotHermitian,
  NotPositive,
  NotPseudoHermitian,
  DegenerateState,
  SingularEta,
  ConstructionDrift,
  AmplificationOverflow,
  PostSelectionSingular,
  NumericalInconsistency,
  UsageError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotPseudoHermitian: return "NotPseudoHermitian";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::SingularEta: return "SingularEta";
    case ErrorKind::ConstructionDrift: return "ConstructionDrift";
    case ErrorKind::AmplificationOverflow: return "AmplificationOverflow";
    case ErrorKind::PostSelectionSingular: return "PostSelectionSingular";
    case ErrorKind::NumericalInconsistency: return "NumericalInconsistency";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can decide whether to continue.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhsense

#endif  // NHSENSE_ERROR_HPP
