#pragma once

#include <cstddef>

#include "ugc/cfg.hpp"
#include "ugc/grammar.hpp"
#include "ugc/language.hpp"
#include "ugc/oracle.hpp"

namespace ugc {

struct CheckResult {
  bool equal = false;
  std::size_t oracle_strings = 0;
  std::size_t cfg_strings = 0;
  StringSet oracle_only;  // at most `witnesses` entries
  StringSet cfg_only;
};

/// Compares the oracle language of `grammar` (unifying only the features in
/// `filter`) with the language of `cfg`, both up to `max_len` tokens.
CheckResult check_equivalence(const Grammar& grammar, const FeatureFilter& filter,
                              const ContextFreeGrammar& cfg, std::size_t max_len,
                              std::size_t string_cap = 1'000'000, std::size_t witnesses = 10);

}  // namespace ugc
