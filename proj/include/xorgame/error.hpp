#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xorgame {

enum class ErrorCode {
  InvalidArgument,
  AllZeroMatrix,
  NotNormalized,
  EmptyGraph,
  TooLarge,
  NotConverged,
  BadDiagonal,
  NotPSD,
  EpsilonOutOfRange,
  LengthMismatch,
  NotClifford,
  ZeroRowBias,
  NonHermitianObservable,
  DimensionMismatch,
  MaximallyMixed,
  EpsilonTooLarge,
  DefectTooLarge,
  NoExactRep,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xorgame
