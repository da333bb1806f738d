#pragma once

#include <stdexcept>
#include <string>

namespace optdesign {

enum class Errc {
  EmptyDesign,
  PointOutsideRegion,
  NonpositiveWeight,
  OriginNotInSupport,
  OnlyOriginSupported,
  WeightOutOfRange,
  OriginAlreadyPresent,
  ResolutionTooSmall,
  WrongDimension,
  NonlinearFamily,
  SingularNonlinearParam,
  DimensionMismatch,
  SingularInformation,
  PremiseViolated,
  NonpositiveInput,
  NoNonOriginPoints,
  NotInXi0,
  WrongOriginWeight,
  T1Negative,
  NotOptimalInput,
  ConditionViolated,
  SingularCandidates,
  NoConvergence,
  ParseError,
};

// All library failures surface as Error; `code` drives CLI exit codes and
// lets tests assert the precise failure. `num_a`/`num_b` carry the payload
// named by the operation contract (expected/actual weight, margin, condition
// number, max excess) when one exists.
struct Error : std::runtime_error {
  Errc code;
  double num_a = 0.0;
  double num_b = 0.0;

  Error(Errc c, const std::string& msg, double a = 0.0, double b = 0.0)
      : std::runtime_error(msg), code(c), num_a(a), num_b(b) {}
};

}  // namespace optdesign
