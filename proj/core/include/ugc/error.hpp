#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ugc {

/// A located message about a grammar source. `line`/`column` are 1-based;
/// zero means "not tied to a source position".
struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string code;     // e.g. "value-outside-domain"
  std::string subject;  // rule id, lexical entry label, or feature name
  std::string message;

  std::string str() const;
  bool operator==(const Diagnostic&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid grammar input.
class GrammarError : public Error {
 public:
  explicit GrammarError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Compilation could not produce a grammar (e.g. nothing derivable from the start symbol).
class CompileError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (strings, tuples) was exceeded.
class ResourceLimitError : public Error {
 public:
  ResourceLimitError(const std::string& what_cap, std::size_t cap);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

/// A token that no lexical entry or terminal covers.
class UnknownTokenError : public Error {
 public:
  explicit UnknownTokenError(const std::string& token);
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

}  // namespace ugc
