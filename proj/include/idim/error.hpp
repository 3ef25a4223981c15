#pragma once

#include <stdexcept>
#include <string>

namespace idim {

enum class ErrorKind {
  DegenerateInput,
  DegenerateVariance,
  ZeroVector,
  DomainError,
  ShapeMismatch,
  TooFewSamples,
  NoValidAlpha,
  InvalidInseparability,
  AllDegenerate,
  EmptyClass,
  ClassTooSmall,
  DegenerateClass,
  InsufficientSamples,
  ParseError,
  RaggedRows,
  EmptyFile,
  BadRecordSize,
  LabelOutOfRange,
  SchemaError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Carries a kind so callers (notably the CLI) can
/// map failures to exit codes and name the failing stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace idim
