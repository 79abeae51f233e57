#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kldproj {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFiniteInput,
  NonPositiveInput,
  NotPositiveDefinite,
  RankDeficient,
  InsufficientSamples,
  EqualMeans,
  UnequalMeans,
  IdenticalDistributions,
  RankDeficientMeans,
  ChannelRankFailure,
  NegativeDivergence,
  Io,
};

std::string_view to_string(ErrorCode code);

// Coarse category used for process exit codes.
enum class ErrorKind { Validation, Numerical, Io };
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kldproj
