#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sepbell {

// Numerical thresholds shared by every module. Reports carry the value they
// were produced with.
struct Tolerances {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double psd = 1e-9;  // eigenvalues >= -psd count as nonnegative
  double equality = 1e-9;
  double verdict = 1e-9;
  double unit = 1e-10;
  double orthonormal = 1e-10;
  double normalization = 1e-12;
  double pure_separable = 1e-9;  // Schmidt s below this is a product state
};

enum class ErrorKind {
  NotHermitian,
  TraceNotOne,
  NotPositive,
  NotNormalized,
  NotUnit,
  NotOrthonormal,
  NotLooBasis,
  ParameterOutOfRange,
  BudgetExhausted,
  NumericalFailure,
  Schema,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::NotLooBasis: return "NotLooBasis";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

/// Thrown for every contract violation. `magnitude` is the measured
/// deviation (e.g. the most negative eigenvalue for NotPositive) when one
/// exists, otherwise 0.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double magnitude = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        magnitude_(magnitude) {}

  ErrorKind kind() const noexcept { return kind_; }
  double magnitude() const noexcept { return magnitude_; }

  // Input problems map to exit code 2, numerical breakdowns to 3.
  bool is_validation() const noexcept {
    return kind_ != ErrorKind::NumericalFailure && kind_ != ErrorKind::BudgetExhausted;
  }

 private:
  ErrorKind kind_;
  double magnitude_;
};

}  // namespace sepbell
