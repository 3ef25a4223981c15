#include "idim/error.hpp"

namespace idim {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NoValidAlpha: return "NoValidAlpha";
    case ErrorKind::InvalidInseparability: return "InvalidInseparability";
    case ErrorKind::AllDegenerate: return "AllDegenerate";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::DegenerateClass: return "DegenerateClass";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::BadRecordSize: return "BadRecordSize";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "UnknownError";
}

}  // namespace idim
