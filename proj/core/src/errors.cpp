#include "retsolve/errors.hpp"

namespace retsolve {

const char* to_string(ValidationError::Code code) {
  switch (code) {
    case ValidationError::Code::MissingField: return "MissingField";
    case ValidationError::Code::NonPositiveRate: return "NonPositiveRate";
    case ValidationError::Code::MuNotAboveR: return "MuNotAboveR";
    case ValidationError::Code::GammaIsOne: return "GammaIsOne";
    case ValidationError::Code::IncomeOrder: return "IncomeOrder";
    case ValidationError::Code::NonPositiveMertonK: return "NonPositiveMertonK";
    case ValidationError::Code::BothOrNeitherSupportGiven:
      return "BothOrNeitherSupportGiven";
    case ValidationError::Code::BadValue: return "BadValue";
  }
  return "Unknown";
}

const char* to_string(NumericError::Code code) {
  switch (code) {
    case NumericError::Code::NoSignChange: return "NoSignChange";
    case NumericError::Code::MaxIterExceeded: return "MaxIterExceeded";
    case NumericError::Code::ToleranceNotReached: return "ToleranceNotReached";
    case NumericError::Code::BracketingFailed: return "BracketingFailed";
    case NumericError::Code::DegenerateDenominator:
      return "DegenerateDenominator";
    case NumericError::Code::NonPositiveZ: return "NonPositiveZ";
    case NumericError::Code::WrongRegime: return "WrongRegime";
    case NumericError::Code::OutOfRegion: return "OutOfRegion";
    case NumericError::Code::WealthOutOfRange: return "WealthOutOfRange";
    case NumericError::Code::InsolventAtDisaster: return "InsolventAtDisaster";
  }
  return "Unknown";
}

}  // namespace retsolve
