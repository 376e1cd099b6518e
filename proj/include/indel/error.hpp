// SPDX-License-Identifier: Apache-2.0
//
// Error vocabulary shared by every module.  All library failures are reported
// by throwing indel::Error; the code lets callers (and the CLI) map failures to
// stable behaviour such as exit statuses or protocol error frames.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indel {

enum class ErrorCode {
  kPatternLengthMismatch,
  kCursorOutOfRange,
  kAlphabetMismatch,
  kSymbolOutOfRange,
  kTruncatedStream,
  kModelDesync,
  kBadMagic,
  kVersionUnsupported,
  kDigestMismatch,
  kMalformed,
  kPolicyPreconditionViolated,
  kComplementMisaligned,
  kUnalignable,
  kInstanceTooLarge,
  kDomainError,
  kIo,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPatternLengthMismatch: return "PatternLengthMismatch";
    case ErrorCode::kCursorOutOfRange: return "CursorOutOfRange";
    case ErrorCode::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::kSymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kModelDesync: return "ModelDesync";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kDigestMismatch: return "DigestMismatch";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kPolicyPreconditionViolated: return "PolicyPreconditionViolated";
    case ErrorCode::kComplementMisaligned: return "ComplementMisaligned";
    case ErrorCode::kUnalignable: return "Unalignable";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace indel
