#include "blowup/error.hpp"

namespace blowup {

std::string_view toString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SubcriticalDimension: return "SubcriticalDimension";
    case ErrorKind::DegenerateRegime: return "DegenerateRegime";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::TrappingViolation: return "TrappingViolation";
    case ErrorKind::TailFitIllConditioned: return "TailFitIllConditioned";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::DivergentIntegrand: return "DivergentIntegrand";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::BlowupOfEpsilon: return "BlowupOfEpsilon";
    case ErrorKind::BadInitialData: return "BadInitialData";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::MeshTangling: return "MeshTangling";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::NoBlowup: return "NoBlowup";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(toString(kind)) + ": " + what), kind_(kind) {}

}  // namespace blowup
