#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ugc {

using Tokens = std::vector<std::string>;

/// A finite language: sorted, duplicate-free sentences with tokens joined by
/// single spaces.
using StringSet = std::vector<std::string>;

Tokens tokenize(std::string_view sentence);
std::string join_tokens(const Tokens& tokens);

/// Sentences in `a` missing from `b` (both sorted).
StringSet set_difference(const StringSet& a, const StringSet& b);

}  // namespace ugc
