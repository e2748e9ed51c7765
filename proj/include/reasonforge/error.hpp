#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rforge {

enum class Errc {
  CycleDetected,
  DivisionNotExact,
  NegativeResult,
  ValueOverflow,
  InvalidGraph,
  InfeasibleConfig,
  InstantiationFailed,
  NoSolvableUnknown,
  NonUniqueSolution,
  NonIntegerSolution,
  NonlinearConstraint,
  ConstraintViolatesPositivity,
  LexiconGap,
  PatternGap,
  KExceedsN,
  EmptyBucket,
  BetaOutOfRange,
  InvalidArgument,
  Io,
};

std::string_view errc_name(Errc code);

/// Domain failure raised by every module. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rforge
