#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace surge {

// Bad argument to a numerical routine (negative spacing, out-of-range fraction, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not converge or produced an unusable result.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  enum class Severity { warning, error };
  Severity severity = Severity::error;
  int line = 0;    // 1-based, 0 when not tied to a line
  int column = 0;  // 1-based, 0 when unknown
  std::string message;
};

// Model-level validation failure; carries every problem found in one pass.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diags);
  ValidationError(int line, const std::string& message);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

std::string format_diagnostic(const Diagnostic& d, const std::string& file = {});

}  // namespace surge
