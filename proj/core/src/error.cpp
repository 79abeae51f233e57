#include "kldproj/error.hpp"

namespace kldproj {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::EqualMeans: return "EqualMeans";
    case ErrorCode::UnequalMeans: return "UnequalMeans";
    case ErrorCode::IdenticalDistributions: return "IdenticalDistributions";
    case ErrorCode::RankDeficientMeans: return "RankDeficientMeans";
    case ErrorCode::ChannelRankFailure: return "ChannelRankFailure";
    case ErrorCode::NegativeDivergence: return "NegativeDivergence";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return ErrorKind::Io;
    case ErrorCode::NonFiniteInput:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::RankDeficient:
    case ErrorCode::RankDeficientMeans:
    case ErrorCode::ChannelRankFailure:
    case ErrorCode::NegativeDivergence:
      return ErrorKind::Numerical;
    default:
      return ErrorKind::Validation;
  }
}

}  // namespace kldproj
