#include "surge/errors.hpp"

namespace surge {

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += format_diagnostic(d);
  }
  return out.empty() ? std::string("validation failed") : out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

ValidationError::ValidationError(int line, const std::string& message)
    : ValidationError(std::vector<Diagnostic>{{Diagnostic::Severity::error, line, 0, message}}) {}

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::string out = file;
  if (d.line > 0) {
    if (!out.empty()) out += ':';
    out += std::to_string(d.line);
    if (d.column > 0) out += ':' + std::to_string(d.column);
  }
  if (!out.empty()) out += ": ";
  out += d.severity == Diagnostic::Severity::error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

}  // namespace surge
