#include "krflow/errors.hpp"

#include <sstream>

namespace krf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonKaehler: return "NonKaehler";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridNotUniform: return "GridNotUniform";
    case ErrorKind::GridNotPositive: return "GridNotPositive";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorKind::InterpolationRangeExceeded: return "InterpolationRangeExceeded";
    case ErrorKind::IncompatibleBase: return "IncompatibleBase";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::Singularity: return "Singularity";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OddWeightConstant: return "OddWeightConstant";
    case ErrorKind::WindowOutsideGrid: return "WindowOutsideGrid";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::LatticeMismatch: return "LatticeMismatch";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::AllZeroQuantity: return "AllZeroQuantity";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

const char* to_string(SingularityKind kind) {
  switch (kind) {
    case SingularityKind::PsiCollapse: return "PsiCollapse";
    case SingularityKind::PhiCollapse: return "PhiCollapse";
    case SingularityKind::GradientBlowup: return "GradientBlowup";
  }
  return "Unknown";
}

static std::string singularity_message(double time, double location, SingularityKind kind) {
  std::ostringstream os;
  os << "singularity " << to_string(kind) << " at t=" << time << ", rho=" << location;
  return os.str();
}

SingularityError::SingularityError(double time, double location, SingularityKind kind)
    : Error(ErrorKind::Singularity, singularity_message(time, location, kind)),
      time_(time),
      location_(location),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace krf
