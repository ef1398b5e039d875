#include "ugc/error.hpp"

#include <sstream>

namespace ugc {

std::string Diagnostic::str() const {
  std::ostringstream os;
  if (line > 0) {
    os << "line " << line;
    if (column > 0) os << ":" << column;
    os << ": ";
  }
  os << code;
  if (!subject.empty()) os << " [" << subject << "]";
  os << ": " << message;
  return os.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}

}  // namespace

GrammarError::GrammarError(std::vector<Diagnostic> diags)
    : Error(join_diagnostics(diags)), diags_(std::move(diags)) {}

ResourceLimitError::ResourceLimitError(const std::string& what_cap, std::size_t cap)
    : Error("resource limit exceeded: " + what_cap + " cap of " + std::to_string(cap)),
      cap_(cap) {}

UnknownTokenError::UnknownTokenError(const std::string& token)
    : Error("unknown token '" + token + "'"), token_(token) {}

}  // namespace ugc
