#include "ftir/error.hpp"

namespace ftir {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveSpan: return "NonPositiveSpan";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonMonotonicAxis: return "NonMonotonicAxis";
    case ErrorCode::UniformAxisRequired: return "UniformAxisRequired";
    case ErrorCode::OutOfAxisRange: return "OutOfAxisRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::PeakOutOfRange: return "PeakOutOfRange";
    case ErrorCode::InvalidPeak: return "InvalidPeak";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LayoutOverflow: return "LayoutOverflow";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::NoBackgroundPixels: return "NoBackgroundPixels";
    case ErrorCode::NoForegroundPixels: return "NoForegroundPixels";
    case ErrorCode::EmptyAfterTrim: return "EmptyAfterTrim";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::MissingStats: return "MissingStats";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::DomainTagMismatch: return "DomainTagMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::ConfigFingerprintMismatch: return "ConfigFingerprintMismatch";
    case ErrorCode::GraphConsumed: return "GraphConsumed";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NoMatches: return "NoMatches";
    case ErrorCode::ZeroBaselineError: return "ZeroBaselineError";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LeakageDetected: return "LeakageDetected";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ftir
