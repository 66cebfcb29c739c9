#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apgarch {

enum class ErrorCode {
  ParseError,
  NonPositivePrice,
  LengthMismatch,
  InvalidSpec,
  NonPositiveDefiniteCorrelation,
  ExplosivePath,
  NonInvertibleBPolynomial,
  UnsupportedOrder,
  StationarityVeto,
  GradientAtInvalidPoint,
  AllStartsInvalid,
  NotEnoughData,
  IllConditionedJ,
  RankDeficientConstraints,
  SingularConstraintCovariance,
};

/// Error families, each mapped to one process exit code by the CLI.
enum class ErrorFamily { Parse = 2, InvalidSpec = 3, Optimization = 4, Inference = 5 };

std::string_view to_string(ErrorCode code);
ErrorFamily family_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }
  int exit_code() const noexcept { return static_cast<int>(family()); }

 private:
  ErrorCode code_;
};

/// Raised by the volatility recursion; carries the first offending time index.
class ExplosivePathError : public Error {
 public:
  ExplosivePathError(long index, const std::string& message)
      : Error(ErrorCode::ExplosivePath, message), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace apgarch
