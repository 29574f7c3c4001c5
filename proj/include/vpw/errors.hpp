#pragma once

#include <stdexcept>
#include <string>

namespace vpw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define VPW_ERROR(Name)                          \
  struct Name : Error {                          \
    explicit Name(const std::string& what)       \
        : Error(std::string(#Name ": ") + what) {} \
  }

VPW_ERROR(NonUniqueProjection);
VPW_ERROR(DegenerateVelocity);
VPW_ERROR(InsideCone);
VPW_ERROR(EmptyCone);
VPW_ERROR(SingularEvaluation);
VPW_ERROR(OutsideStrip);
VPW_ERROR(NoClosedForm);
VPW_ERROR(QuadratureNonConvergence);
VPW_ERROR(SupportViolation);
VPW_ERROR(StepRejected);
VPW_ERROR(ReEntryDetected);
VPW_ERROR(MissingEinf);
VPW_ERROR(EmptyGoodSet);
VPW_ERROR(InsufficientData);
VPW_ERROR(NonPositiveValue);
VPW_ERROR(FormatError);

#undef VPW_ERROR

// Config validation failure; carries the offending key and its line.
struct SchemaError : Error {
  SchemaError(const std::string& key, int line, const std::string& msg)
      : Error("SchemaError: " + key + " (line " + std::to_string(line) + "): " + msg),
        key(key),
        line(line) {}
  std::string key;
  int line;
};

}  // namespace vpw
