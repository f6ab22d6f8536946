#pragma once

#include <stdexcept>
#include <string>

namespace krf {

enum class ErrorKind {
  InvalidArgument,
  NonKaehler,
  GridTooCoarse,
  GridNotUniform,
  GridNotPositive,
  OutOfRange,
  TooCloseToBoundary,
  InterpolationRangeExceeded,
  IncompatibleBase,
  StabilityViolation,
  Singularity,
  NoConvergence,
  OddWeightConstant,
  WindowOutsideGrid,
  HorizonExceeded,
  LatticeMismatch,
  WindowTooSmall,
  AllZeroQuantity,
  NotApplicable,
  ConfigInvalid,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

enum class SingularityKind { PsiCollapse, PhiCollapse, GradientBlowup };

const char* to_string(SingularityKind kind);

class SingularityError : public Error {
 public:
  SingularityError(double time, double location, SingularityKind kind);
  double time() const { return time_; }
  double location() const { return location_; }
  SingularityKind singularity() const { return kind_; }

 private:
  double time_;
  double location_;
  SingularityKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace krf
