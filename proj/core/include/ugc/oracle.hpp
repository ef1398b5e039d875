#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ugc/grammar.hpp"
#include "ugc/language.hpp"

namespace ugc {

/// Restricts unification to the named features; nullopt means every
/// declared feature participates.
using FeatureFilter = std::optional<std::vector<std::string>>;

struct ParseResult {
  bool accepted = false;
  std::uint64_t derivation_count = 0;       // saturates at the configured cap
  std::vector<std::string> derivations;     // bracketed trees, only when requested
};

struct OracleParseOptions {
  FeatureFilter feature_filter;
  std::uint64_t derivation_cap = 1'000'000;
  std::size_t max_trees = 0;
};

struct OracleEnumerateOptions {
  FeatureFilter feature_filter;
  std::size_t string_cap = 1'000'000;
};

/// Bottom-up chart parse with feature unification directly on the grammar.
/// Throws UnknownTokenError for tokens outside the lexicon.
ParseResult oracle_parse(const Grammar& grammar, const Tokens& tokens,
                         const OracleParseOptions& options = {});

/// Every sentence of length 1..max_len derivable from the start symbol.
/// Throws ResourceLimitError when more than `string_cap` strings would be stored.
StringSet oracle_enumerate(const Grammar& grammar, std::size_t max_len,
                           const OracleEnumerateOptions& options = {});

}  // namespace ugc
