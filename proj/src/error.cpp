#include "distfn/error.hpp"

namespace distfn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMaskTouchesBorder: return "MaskTouchesBorder";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kMaskMismatch: return "MaskMismatch";
    case ErrorCode::kBadLambda: return "BadLambda";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kDegenerateSum: return "DegenerateSum";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptySlice: return "EmptySlice";
    case ErrorCode::kDoesNotFit: return "DoesNotFit";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string Diagnostics::str() const {
  if (empty()) return "ok";
  std::string out;
  auto append = [&out](std::string_view name) {
    if (!out.empty()) out += ';';
    out += name;
  };
  if (has(Diagnostic::kClamped)) append("clamped");
  if (has(Diagnostic::kNoConvergence)) append("no_convergence");
  return out;
}

}  // namespace distfn
