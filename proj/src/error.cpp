#include "apgarch/error.hpp"

namespace apgarch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonPositiveDefiniteCorrelation: return "NonPositiveDefiniteCorrelation";
    case ErrorCode::ExplosivePath: return "ExplosivePath";
    case ErrorCode::NonInvertibleBPolynomial: return "NonInvertibleBPolynomial";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::StationarityVeto: return "StationarityVeto";
    case ErrorCode::GradientAtInvalidPoint: return "GradientAtInvalidPoint";
    case ErrorCode::AllStartsInvalid: return "AllStartsInvalid";
    case ErrorCode::NotEnoughData: return "NotEnoughData";
    case ErrorCode::IllConditionedJ: return "IllConditionedJ";
    case ErrorCode::RankDeficientConstraints: return "RankDeficientConstraints";
    case ErrorCode::SingularConstraintCovariance: return "SingularConstraintCovariance";
  }
  return "Unknown";
}

ErrorFamily family_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NonPositivePrice:
      return ErrorFamily::Parse;
    case ErrorCode::LengthMismatch:
    case ErrorCode::InvalidSpec:
    case ErrorCode::NonPositiveDefiniteCorrelation:
    case ErrorCode::ExplosivePath:
    case ErrorCode::NonInvertibleBPolynomial:
    case ErrorCode::UnsupportedOrder:
    case ErrorCode::StationarityVeto:
      return ErrorFamily::InvalidSpec;
    case ErrorCode::GradientAtInvalidPoint:
    case ErrorCode::AllStartsInvalid:
    case ErrorCode::NotEnoughData:
      return ErrorFamily::Optimization;
    case ErrorCode::IllConditionedJ:
    case ErrorCode::RankDeficientConstraints:
    case ErrorCode::SingularConstraintCovariance:
      return ErrorFamily::Inference;
  }
  return ErrorFamily::InvalidSpec;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace apgarch
