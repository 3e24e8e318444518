#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdeform {

enum class NumericalFailure {
  Overflow,           ///< some state or stage became non-finite
  StepUnderflow,      ///< adaptive step dropped below 1e-12
  DegenerateTangent,  ///< a tangent vector collapsed below 1e-300 between renormalizations
};

constexpr std::string_view to_string(NumericalFailure f) {
  switch (f) {
    case NumericalFailure::Overflow:
      return "Overflow";
    case NumericalFailure::StepUnderflow:
      return "StepUnderflow";
    case NumericalFailure::DegenerateTangent:
      return "DegenerateTangent";
  }
  return "Unknown";
}

/// Thrown when a computation leaves the representable or well-conditioned
/// regime. Invalid inputs raise std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalFailure kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  NumericalFailure kind() const noexcept { return kind_; }

 private:
  NumericalFailure kind_;
};

}  // namespace tdeform
