#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ugc/cfg.hpp"
#include "ugc/grammar.hpp"
#include "ugc/language.hpp"
#include "ugc/oracle.hpp"
#include "ugc/pfsg.hpp"

namespace testing {

std::string asset(const std::string& relative);
std::string read_file(const std::string& path);
ugc::Grammar fixture(const std::string& name);  // assets/fixtures/<name>.ugr
ugc::ContextFreeGrammar cfg_fixture(const std::string& name);

/// Language of a unification grammar computed by grounding every category
/// over the full feature domains and running a plain string fixpoint. Shares
/// no code with the library's oracle or compiler; only usable on grammars
/// with a handful of small features.
ugc::StringSet ground_language(const ugc::Grammar& g, std::size_t max_len,
                               const ugc::FeatureFilter& filter = std::nullopt);

/// Ground items (symbol plus one value index per kept feature) that derive
/// some string of at most max_len tokens, and those also reachable from the
/// start symbol through rules whose daughters all derive strings.
struct GroundItems {
  std::vector<std::string> features;
  std::vector<std::pair<std::string, std::vector<int>>> productive;
  std::vector<std::pair<std::string, std::vector<int>>> reachable;
};
GroundItems ground_items(const ugc::Grammar& g, std::size_t max_len);

/// Every nonempty token sequence over `vocab` of length at most max_len.
ugc::StringSet all_sequences(const std::vector<std::string>& vocab, std::size_t max_len);

/// Sentence probability by walking every path of the PFSG set that spells
/// `tokens`; exponential, for tiny graphs only.
double path_probability(const ugc::PfsgSet& set, const ugc::Tokens& tokens);

/// Small random grammar in the DSL over symbols S A B and preterminals X Y,
/// tokens a b c, features f{p,q} g{u,v,w} (syntactic) and h{k,l} (semantic).
/// The result may fail validation; callers skip those.
std::string random_grammar_source(std::mt19937& rng, bool left_recursion_allowed = true);

/// Random seeds come from a fixed base so failures are reproducible.
constexpr std::uint32_t kSeed = 20240613;

}  // namespace testing
