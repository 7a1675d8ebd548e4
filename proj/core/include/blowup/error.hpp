#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blowup {

enum class ErrorKind {
  SubcriticalDimension,
  DegenerateRegime,
  InvalidArgument,
  TrappingViolation,
  TailFitIllConditioned,
  QuadratureNotConverged,
  DivergentIntegrand,
  RegimeMismatch,
  NegativeEigenvalue,
  BlowupOfEpsilon,
  BadInitialData,
  StepSizeUnderflow,
  MeshTangling,
  WindowTooShort,
  DegenerateFit,
  NoBlowup,
  BadConfig,
  Io,
};

std::string_view toString(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace blowup
