#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ugc/cfg.hpp"
#include "ugc/language.hpp"
#include "ugc/pfsg.hpp"

namespace ugc {

struct CfgParseResult {
  bool accepted = false;
  std::uint64_t derivation_count = 0;  // start-to-end paths; saturates at 2^63
  double prob = 0;
  double log_prob = 0;                 // natural log; -infinity when rejected
};

/// Inside computation over the graph set: sums the product of transition
/// probabilities over every path through the top graph that spells `tokens`.
CfgParseResult cfg_parse(const PfsgSet& set, const Tokens& tokens);
CfgParseResult cfg_parse(const ContextFreeGrammar& cfg, const Tokens& tokens);

/// Every sentence of length 1..max_len generated by the CFG. Throws
/// ResourceLimitError when more than `string_cap` strings would be stored.
StringSet cfg_enumerate(const ContextFreeGrammar& cfg, std::size_t max_len,
                        std::size_t string_cap = 1'000'000);

/// Sentences of length 1..max_len spelled by start-to-end paths of the top
/// graph, expanding references. Used to cross-check build_pfsg.
StringSet pfsg_enumerate(const PfsgSet& set, std::size_t max_len,
                         std::size_t string_cap = 1'000'000);

struct PerplexityResult {
  double perplexity = 0;
  std::size_t sentences = 0;  // accepted and scored
  std::size_t words = 0;
  std::vector<std::string> rejected;
};

/// 2^(-sum log2 P(s) / sum |s|) over the accepted sentences. Throws Error
/// when no sentence is accepted.
PerplexityResult perplexity(const PfsgSet& set, const std::vector<std::string>& corpus);
PerplexityResult perplexity(const ContextFreeGrammar& cfg, const std::vector<std::string>& corpus);

}  // namespace ugc
