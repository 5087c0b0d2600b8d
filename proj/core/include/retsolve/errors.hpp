// Exception types shared by the whole library.
#pragma once

#include <stdexcept>
#include <string>

namespace retsolve {

// A parameter record violates a model constraint. `field()` names the
// offending input so CLI error messages can point at it.
class ValidationError : public std::runtime_error {
public:
  enum class Code {
    MissingField,
    NonPositiveRate,
    MuNotAboveR,
    GammaIsOne,
    IncomeOrder,
    NonPositiveMertonK,
    BothOrNeitherSupportGiven,
    BadValue,
  };

  ValidationError(Code code, std::string field, const std::string& what)
      : std::runtime_error(what), code_(code), field_(std::move(field)) {}

  Code code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

private:
  Code code_;
  std::string field_;
};

// A numerical routine cannot deliver its contract (lost bracket, bad
// region, iteration budget exhausted, ...).
class NumericError : public std::runtime_error {
public:
  enum class Code {
    NoSignChange,
    MaxIterExceeded,
    ToleranceNotReached,
    BracketingFailed,
    DegenerateDenominator,
    NonPositiveZ,
    WrongRegime,
    OutOfRegion,
    WealthOutOfRange,
    InsolventAtDisaster,
  };

  NumericError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Code code() const noexcept { return code_; }

private:
  Code code_;
};

const char* to_string(ValidationError::Code code);
const char* to_string(NumericError::Code code);

}  // namespace retsolve
