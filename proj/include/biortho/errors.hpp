#pragma once

#include <stdexcept>
#include <string>

namespace biortho {

/// Base class for all numeric and usage failures raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceFailure : Error {
  using Error::Error;
};
struct SingularBasis : Error {
  using Error::Error;
};
struct PairingAmbiguous : Error {
  using Error::Error;
};
struct DegenerateSpectrum : Error {
  using Error::Error;
};
struct ExceptionalPoint : Error {
  using Error::Error;
};
struct ZeroState : Error {
  using Error::Error;
};
struct SystemMismatch : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct DimensionNotTwo : Error {
  using Error::Error;
};
struct ComplexSpectrum : Error {
  using Error::Error;
};
struct InvalidSpin : Error {
  using Error::Error;
};
struct DegenerateGap : Error {
  using Error::Error;
};
struct MatchingAmbiguous : Error {
  using Error::Error;
};
struct NoPositiveSigning : Error {
  using Error::Error;
};
struct ZeroDenominator : Error {
  using Error::Error;
};
struct SplitInvalid : Error {
  using Error::Error;
};
struct DenominatorSingular : Error {
  using Error::Error;
};
struct OverflowRisk : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct NonFiniteInput : Error {
  using Error::Error;
};

}  // namespace biortho
