#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vsol {

// Every pipeline failure carries a kind tag (SchemaError, ParseError, ...) so
// callers can branch on it and the CLI can print it without a stack trace.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)), detail_(msg) {}
  const std::string& kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

struct Diagnostic {
  std::string kind;
  std::string location;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  std::string s = d.kind;
  if (!d.location.empty()) s += " at " + d.location;
  if (!d.message.empty()) s += ": " + d.message;
  return s;
}

}  // namespace vsol
