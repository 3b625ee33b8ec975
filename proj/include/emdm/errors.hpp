#pragma once

#include <stdexcept>
#include <string>

namespace emdm {

enum class ErrorCode {
  FILE_NOT_FOUND,
  MALFORMED_RECORD,
  DUPLICATE_ID,
  INSUFFICIENT_POOL,
  SAMPLE_IN_SHOTS,
  EMPTY_COT,
  MISSING_REFERENCE_COT,
  CONFIG_MISSING,
  ENDPOINT_ERROR,
  CACHE_MISS,
  COVERAGE_MISMATCH,
  SCHEME_MISMATCH,
  MISSING_SCORES,
  TOO_FEW_MODELS,
  INVALID_BOUNDS,
  TOO_MANY_CATEGORIES,
  EMPTY_DENOMINATOR,
  NONPOSITIVE_SCORE,
  MANIFEST_MISMATCH,
  LOCK_HELD,
  USAGE,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::FILE_NOT_FOUND: return "FILE_NOT_FOUND";
    case ErrorCode::MALFORMED_RECORD: return "MALFORMED_RECORD";
    case ErrorCode::DUPLICATE_ID: return "DUPLICATE_ID";
    case ErrorCode::INSUFFICIENT_POOL: return "INSUFFICIENT_POOL";
    case ErrorCode::SAMPLE_IN_SHOTS: return "SAMPLE_IN_SHOTS";
    case ErrorCode::EMPTY_COT: return "EMPTY_COT";
    case ErrorCode::MISSING_REFERENCE_COT: return "MISSING_REFERENCE_COT";
    case ErrorCode::CONFIG_MISSING: return "CONFIG_MISSING";
    case ErrorCode::ENDPOINT_ERROR: return "ENDPOINT_ERROR";
    case ErrorCode::CACHE_MISS: return "CACHE_MISS";
    case ErrorCode::COVERAGE_MISMATCH: return "COVERAGE_MISMATCH";
    case ErrorCode::SCHEME_MISMATCH: return "SCHEME_MISMATCH";
    case ErrorCode::MISSING_SCORES: return "MISSING_SCORES";
    case ErrorCode::TOO_FEW_MODELS: return "TOO_FEW_MODELS";
    case ErrorCode::INVALID_BOUNDS: return "INVALID_BOUNDS";
    case ErrorCode::TOO_MANY_CATEGORIES: return "TOO_MANY_CATEGORIES";
    case ErrorCode::EMPTY_DENOMINATOR: return "EMPTY_DENOMINATOR";
    case ErrorCode::NONPOSITIVE_SCORE: return "NONPOSITIVE_SCORE";
    case ErrorCode::MANIFEST_MISMATCH: return "MANIFEST_MISMATCH";
    case ErrorCode::LOCK_HELD: return "LOCK_HELD";
    case ErrorCode::USAGE: return "USAGE";
  }
  return "UNKNOWN";
}

// All contract violations surface as this one exception type; callers that
// care about the specific failure branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace emdm
