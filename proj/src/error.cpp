#include "xorgame/error.hpp"

namespace xorgame {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllZeroMatrix: return "AllZeroMatrix";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::BadDiagonal: return "BadDiagonal";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotClifford: return "NotClifford";
    case ErrorCode::ZeroRowBias: return "ZeroRowBias";
    case ErrorCode::NonHermitianObservable: return "NonHermitianObservable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaximallyMixed: return "MaximallyMixed";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::DefectTooLarge: return "DefectTooLarge";
    case ErrorCode::NoExactRep: return "NoExactRep";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace xorgame
