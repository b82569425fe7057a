#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace distfn {

enum class ErrorCode {
  kMaskTouchesBorder,
  kEmptyMask,
  kTooSmall,
  kMaskMismatch,
  kBadLambda,
  kBadConfig,
  kDegenerateSum,
  kParseError,
  kEmptySlice,
  kDoesNotFit,
  kIoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal conditions attached to results.
enum class Diagnostic : unsigned {
  kNone = 0,
  kClamped = 1u << 0,       // v needed the positivity clamp before a log/division
  kNoConvergence = 1u << 1  // CG hit max_iters
};

class Diagnostics {
 public:
  Diagnostics() = default;
  Diagnostics(Diagnostic d) : bits_(static_cast<unsigned>(d)) {}  // NOLINT

  Diagnostics& operator|=(Diagnostics other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend Diagnostics operator|(Diagnostics a, Diagnostics b) { return a |= b; }

  bool has(Diagnostic d) const { return (bits_ & static_cast<unsigned>(d)) != 0; }
  bool empty() const { return bits_ == 0; }
  friend bool operator==(Diagnostics, Diagnostics) = default;

  // "ok" when empty, otherwise names joined by ';'.
  std::string str() const;

 private:
  unsigned bits_ = 0;
};

}  // namespace distfn
