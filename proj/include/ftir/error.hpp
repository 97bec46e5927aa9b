#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftir {

enum class ErrorCode {
  // core
  NonPositiveSpan,
  TooFewPoints,
  NonMonotonicAxis,
  UniformAxisRequired,
  OutOfAxisRange,
  LengthMismatch,
  NonFiniteValue,
  EmptyBand,
  IoError,
  FormatVersionMismatch,
  ShapeMismatch,
  // synthgen
  PeakOutOfRange,
  InvalidPeak,
  InvalidConfig,
  LayoutOverflow,
  // prep
  DegenerateDistribution,
  NoBackgroundPixels,
  NoForegroundPixels,
  EmptyAfterTrim,
  // transform
  DegenerateSpectrum,
  MissingStats,
  DegenerateRange,
  DomainTagMismatch,
  // dsp
  InvalidParams,
  EmptySpace,
  // neural
  ConfigFingerprintMismatch,
  GraphConsumed,
  EmptyDataset,
  // evalbench
  ZeroVector,
  DegenerateVariance,
  NoMatches,
  ZeroBaselineError,
  TooFewSamples,
  LeakageDetected,
  // cli
  UsageError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace ftir
