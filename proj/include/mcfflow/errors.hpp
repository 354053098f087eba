#ifndef MCFFLOW_ERRORS_HPP
#define MCFFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcfflow {

// Two families of failures, mirrored by the CLI exit codes: bad input
// (exit 2) and numerical breakdown during a computation (exit 3).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConvexityLost : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class StabilityViolation : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class PoleSingularity : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InfeasibleBody : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class WindowTooShort : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class WindowNotCovered : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ParameterGateViolated : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NotKConvex : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class SchemaMismatch : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class CorruptRecord : public ValidationError {
public:
  CorruptRecord(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

} // namespace mcfflow

#endif
