#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ugc/error.hpp"

namespace ugc {

enum class FeatureKind { Syntactic, Semantic };

struct FeatureDecl {
  std::string name;
  FeatureKind kind = FeatureKind::Syntactic;
  std::vector<std::string> domain;  // ordered, unique

  std::optional<std::size_t> index_of(std::string_view value) const;
  bool operator==(const FeatureDecl&) const = default;
};

/// Constraint on one feature of a category. An unconstrained feature is
/// simply absent from the category's constraint map.
struct Constraint {
  enum class Kind { Atom, Subset, Var };

  Kind kind = Kind::Atom;
  std::vector<std::string> values;  // Atom: one value; Subset: >=1 values in domain order
  std::string var;                  // Var only

  static Constraint atom(std::string value);
  static Constraint subset(std::vector<std::string> values);
  static Constraint variable(std::string name);

  bool operator==(const Constraint&) const = default;
};

struct Category {
  std::string symbol;
  std::map<std::string, Constraint> constraints;

  const Constraint* find(std::string_view feature) const;
  bool operator==(const Category&) const = default;
};

struct Rule {
  std::string id;
  Category mother;
  std::vector<Category> daughters;
  std::size_t line = 0;  // source position, not part of equality

  bool operator==(const Rule& o) const {
    return id == o.id && mother == o.mother && daughters == o.daughters;
  }
};

struct LexEntry {
  std::vector<std::string> surface;
  Category category;
  std::size_t line = 0;

  std::string label() const;  // "\"w1 w2\"" for diagnostics
  bool operator==(const LexEntry& o) const {
    return surface == o.surface && category == o.category;
  }
};

struct Grammar {
  std::vector<FeatureDecl> features;
  std::vector<Rule> rules;
  std::vector<LexEntry> lexicon;
  std::string start;
  std::size_t start_line = 0;

  const FeatureDecl* feature(std::string_view name) const;
  std::optional<std::size_t> feature_index(std::string_view name) const;
  const Rule* rule(std::string_view id) const;

  bool operator==(const Grammar& o) const {
    return features == o.features && rules == o.rules && lexicon == o.lexicon &&
           start == o.start;
  }
};

/// Parses the grammar DSL and validates the result. Throws GrammarError
/// carrying every syntax or validation diagnostic found.
Grammar parse_grammar(std::string_view source);

/// Reads and parses a grammar file. Diagnostics keep their line numbers.
Grammar load_grammar(const std::string& path);

/// Checks all well-formedness invariants. Empty result iff valid.
std::vector<Diagnostic> validate(const Grammar& grammar);

/// Renders a grammar in the DSL; parse_grammar(print_grammar(g)) == g.
std::string print_grammar(const Grammar& grammar);
std::string print_category(const Category& cat, const Grammar& grammar);

/// True for identifiers that denote variables in feature positions.
bool is_variable_name(std::string_view ident);

}  // namespace ugc
