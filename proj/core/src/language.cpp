#include "ugc/language.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

namespace ugc {

Tokens tokenize(std::string_view sentence) {
  Tokens out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t b = i;
    while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i > b) out.emplace_back(sentence.substr(b, i - b));
  }
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

StringSet set_difference(const StringSet& a, const StringSet& b) {
  StringSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace ugc
