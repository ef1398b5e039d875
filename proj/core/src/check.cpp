#include "ugc/check.hpp"

#include "ugc/language_model.hpp"

namespace ugc {

CheckResult check_equivalence(const Grammar& grammar, const FeatureFilter& filter,
                              const ContextFreeGrammar& cfg, std::size_t max_len,
                              std::size_t string_cap, std::size_t witnesses) {
  OracleEnumerateOptions opts;
  opts.feature_filter = filter;
  opts.string_cap = string_cap;
  StringSet expected = oracle_enumerate(grammar, max_len, opts);
  StringSet actual = cfg_enumerate(cfg, max_len, string_cap);
  CheckResult r;
  r.oracle_strings = expected.size();
  r.cfg_strings = actual.size();
  r.oracle_only = set_difference(expected, actual);
  r.cfg_only = set_difference(actual, expected);
  r.equal = r.oracle_only.empty() && r.cfg_only.empty();
  if (r.oracle_only.size() > witnesses) r.oracle_only.resize(witnesses);
  if (r.cfg_only.size() > witnesses) r.cfg_only.resize(witnesses);
  return r;
}

}  // namespace ugc
