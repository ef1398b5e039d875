#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ugc/error.hpp"

namespace ugc {

/// Right-hand-side expression of a GSL-like production.
struct Expr {
  enum class Kind { Terminal, Ref, Seq, Alt, Star };

  Kind kind = Kind::Terminal;
  std::string text;  // Terminal: the token; Ref: nonterminal name
  std::vector<Expr> children;

  static Expr terminal(std::string token);
  static Expr ref(std::string name);
  static Expr seq(std::vector<Expr> items);
  static Expr alt(std::vector<Expr> items);
  static Expr star(Expr body);

  bool operator==(const Expr&) const = default;
};

/// Where an emitted alternative came from.
enum class Origin { Rule, Lexicon, Range, Rewrite, Text };

struct Production {
  std::vector<Expr> alternatives;
  std::vector<Origin> origins;  // parallel to alternatives

  void add(Expr e, Origin o) {
    alternatives.push_back(std::move(e));
    origins.push_back(o);
  }
  bool operator==(const Production& o) const { return alternatives == o.alternatives; }
};

struct ContextFreeGrammar {
  std::string start;
  std::map<std::string, Production> productions;

  bool operator==(const ContextFreeGrammar&) const = default;
};

/// Text form: one `name -> alt | alt ;` line per production, start first,
/// then the rest in name order. Terminals are double-quoted.
std::string print_cfg(const ContextFreeGrammar& cfg);
std::string print_expr(const Expr& e);

/// Reads the text form. The first production names the start symbol.
ContextFreeGrammar parse_cfg(std::string_view text);
ContextFreeGrammar load_cfg(const std::string& path);

/// Diagnostics for unresolved references and empty productions.
std::vector<Diagnostic> validate_cfg(const ContextFreeGrammar& cfg);

/// Nonterminals that can derive the empty string.
std::map<std::string, bool> nullable_nonterminals(const ContextFreeGrammar& cfg);

/// Edges X -> Y where Y can appear leftmost in a derivation step from X.
std::map<std::string, std::vector<std::string>> leftmost_graph(const ContextFreeGrammar& cfg);

/// True iff the leftmost graph has a cycle (direct or indirect left recursion).
bool has_left_recursion(const ContextFreeGrammar& cfg);

/// Rewrites left-recursive nonterminals with the ordering-based method,
/// introducing `<name>__lr` tail nonterminals. Grammars without left
/// recursion come back unchanged.
ContextFreeGrammar eliminate_left_recursion(const ContextFreeGrammar& cfg);

}  // namespace ugc
