#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ugc/cfg.hpp"
#include "ugc/grammar.hpp"

namespace ugc {

/// Which features survive into the compiled grammar.
struct FeatureSelection {
  enum class Mode { Syntactic, List, All };

  Mode mode = Mode::Syntactic;
  std::vector<std::string> names;  // Mode::List only

  static FeatureSelection syntactic() { return {}; }
  static FeatureSelection all() { return {Mode::All, {}}; }
  static FeatureSelection list(std::vector<std::string> names) {
    return {Mode::List, std::move(names)};
  }
};

/// Names of the kept features in declaration order. Throws GrammarError if a
/// listed name is undeclared.
std::vector<std::string> selected_features(const Grammar& grammar, const FeatureSelection& sel);

/// Drops every constraint and declaration of features outside the selection.
Grammar strip_features(const Grammar& grammar, const FeatureSelection& sel);

/// One instantiation dimension of a rule: a shared variable, or a single
/// (position, feature) pair. Position 0 is the mother, i > 0 daughter i-1.
struct Slot {
  std::size_t feature = 0;
  std::string var;  // empty unless the slot is a variable
  std::vector<std::pair<std::size_t, std::size_t>> occurrences;  // (position, dimension)
  std::uint64_t allowed = 0;  // value mask from Atom/Subset constraints

  /// A slot is linked when it ties two daughters together or two mother
  /// dimensions together. Such slots cannot hold a value range without
  /// losing the correlation. A slot shared by the mother and one daughter
  /// can: emission narrows it to the range of the referencing nonterminal.
  bool linked() const {
    std::size_t mother = 0, daughters = 0;
    for (auto [p, k] : occurrences) ++(p == 0 ? mother : daughters);
    return mother > 1 || daughters > 1;
  }
};

/// Ground instantiations of one rule that survive bottom-up and top-down filtering.
struct InstantiationSet {
  std::string rule_id;
  std::vector<Slot> slots;  // in feature-declaration order
  std::vector<std::vector<std::uint8_t>> tuples;  // value index per slot, sorted
};

/// A rectangle of tuples: one value mask per slot.
struct MergedInstance {
  std::vector<std::uint64_t> values;
  bool operator==(const MergedInstance&) const = default;
};

struct CompileLimits {
  std::size_t tuple_cap = 10'000'000;
};

/// Features that name categories of `symbol`: those constrained on it somewhere.
std::vector<std::size_t> naming_dimensions(const Grammar& grammar, const std::string& symbol);

/// Builds the slot layout of every rule (no tuples).
std::vector<InstantiationSet> rule_slots(const Grammar& grammar);

/// Demand-driven instantiation: tuples supported bottom-up from the lexicon
/// and demanded top-down from the start symbol. Throws CompileError when the
/// start symbol derives nothing and ResourceLimitError past the tuple cap.
std::vector<InstantiationSet> compute_instantiations(const Grammar& grammar,
                                                     const CompileLimits& limits = {});

/// Greedy rectangle cover over the unlinked slots.
std::vector<MergedInstance> merge_ranges(const InstantiationSet& inst);

/// Emits one production per referenced (symbol, value-range) nonterminal.
ContextFreeGrammar emit_cfg(const Grammar& grammar, const std::vector<InstantiationSet>& inst,
                            const std::vector<std::vector<MergedInstance>>& merged);

/// Mnemonic nonterminal name, e.g. `np__agr-sg+pl__sort-loc`.
std::string nonterminal_name(const Grammar& grammar, const std::string& symbol,
                             const std::vector<std::size_t>& dims,
                             const std::vector<std::uint64_t>& values);

struct ExpansionStats {
  std::string naive_count;       // decimal, arbitrary precision
  std::size_t emitted_rules = 0;
  std::string reduction_factor;  // naive_count / max(emitted_rules, 1), decimal
  double reduction_log10 = 0;

  std::string str() const;  // key=value lines
};

ExpansionStats expansion_stats(const Grammar& grammar, const ContextFreeGrammar& cfg);

struct Compilation {
  Grammar grammar;  // after feature stripping
  std::vector<InstantiationSet> instantiations;
  std::vector<std::vector<MergedInstance>> merged;
  ContextFreeGrammar emitted;  // straight from emit_cfg
  ContextFreeGrammar cfg;      // after left-recursion elimination
  ExpansionStats stats;
};

/// Full pipeline: strip, instantiate, merge, emit, remove left recursion.
Compilation compile(const Grammar& grammar, const FeatureSelection& sel = {},
                    const CompileLimits& limits = {});

}  // namespace ugc
