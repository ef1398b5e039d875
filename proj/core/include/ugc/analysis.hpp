#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ugc/grammar.hpp"
#include "ugc/pfsg.hpp"

namespace ugc {

/// Sorted, duplicate-free surface tokens of the lexicon.
std::vector<std::string> vocabulary(const Grammar& grammar);

/// S -> W S | W with one W entry per word. Throws Error on an empty vocabulary.
Grammar wordplus_grammar(const std::vector<std::string>& vocab);

/// Keeps the first k lexical entries (file order) of every distinct lexical category.
Grammar k_words_per_category(const Grammar& grammar, std::size_t k);

/// Removes the listed features (values and variable links) from one rule.
/// Throws GrammarError for an unknown rule or a feature the rule does not constrain.
Grammar unlink_features(const Grammar& grammar, const std::string& rule_id,
                        const std::vector<std::string>& features);

struct Delta {
  double left = 0;
  double right = 0;
  double diff = 0;   // right - left
  double ratio = 1;  // right / left; infinity when only right is nonzero
};

struct CategoryDelta {
  std::string category;
  bool in_left = false;
  bool in_right = false;
  Delta graphs, mean_nodes, mean_transitions;
};

struct DiffReport {
  std::string left, right;
  Delta graphs, nodes, transitions, max_transitions;
  /// Categories present on both sides first, ordered by how far the
  /// mean_transitions ratio is from 1 (largest change first), then the rest.
  std::vector<CategoryDelta> categories;
};

DiffReport compare(const MetricsReport& left, const MetricsReport& right,
                   const std::string& left_name = "left", const std::string& right_name = "right");

std::string format_diff(const DiffReport& diff);  // key=value lines
std::string diff_table(const DiffReport& diff);

}  // namespace ugc
