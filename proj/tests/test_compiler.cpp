#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "ugc/compiler.hpp"
#include "ugc/language_model.hpp"

using namespace ugc;

namespace {

const InstantiationSet& inst_of(const Compilation& c, const std::string& rule) {
  for (const auto& i : c.instantiations)
    if (i.rule_id == rule) return i;
  throw std::runtime_error("no rule " + rule);
}

const std::vector<MergedInstance>& merged_of(const Compilation& c, const std::string& rule) {
  for (std::size_t i = 0; i < c.instantiations.size(); ++i)
    if (c.instantiations[i].rule_id == rule) return c.merged[i];
  throw std::runtime_error("no rule " + rule);
}

std::size_t rule_alternatives(const ContextFreeGrammar& cfg) {
  std::size_t n = 0;
  for (const auto& [name, p] : cfg.productions)
    n += static_cast<std::size_t>(std::count(p.origins.begin(), p.origins.end(), Origin::Rule));
  return n;
}

Slot slot(std::size_t feature, std::vector<std::pair<std::size_t, std::size_t>> occ, std::size_t domain) {
  Slot s;
  s.feature = feature;
  s.occurrences = std::move(occ);
  s.allowed = (std::uint64_t{1} << domain) - 1;
  return s;
}

// Every tuple covered by a merged instance.
std::multiset<std::vector<std::uint8_t>> points(const std::vector<MergedInstance>& m) {
  std::multiset<std::vector<std::uint8_t>> out;
  for (const auto& inst : m) {
    std::vector<std::vector<std::uint8_t>> acc{{}};
    for (auto mask : inst.values) {
      std::vector<std::vector<std::uint8_t>> next;
      for (const auto& a : acc)
        for (std::uint8_t v = 0; v < 64; ++v)
          if (mask >> v & 1) {
            auto b = a;
            b.push_back(v);
            next.push_back(b);
          }
      acc = std::move(next);
    }
    out.insert(acc.begin(), acc.end());
  }
  return out;
}

std::vector<std::string> syntactic(const Grammar& g) { return selected_features(g, FeatureSelection::syntactic()); }

const char* kFixtures[] = {"agreement", "center", "left_rec", "rel_linked", "rel_unlinked", "right_rec", "wordplus"};

}  // namespace

TEST_SUITE("cfg_compiler") {
  TEST_CASE("semantic features are stripped by default") {
    Grammar g = parse_grammar(R"(feature agr syn {sg,pl}
feature sem_val sem {a,b}
start S
rule r: S -> NP:[agr=A, sem_val=V] VP:[agr=A, sem_val=V]
lex "x": NP:[agr=sg, sem_val=a]
lex "y": VP:[agr=sg, sem_val=b]
)");
    Grammar s = strip_features(g, FeatureSelection::syntactic());
    REQUIRE(s.features.size() == 1);
    CHECK(s.features[0].name == "agr");
    CHECK_FALSE(s.rules[0].daughters[0].find("sem_val"));
    CHECK(s.rules[0].daughters[0].find("agr"));
    CHECK(strip_features(g, FeatureSelection::all()) == g);
    CHECK_THROWS_AS(strip_features(g, FeatureSelection::list({"nope"})), GrammarError);
  }

  TEST_CASE("selecting only sort on the shuttle fragment") {
    Grammar g = load_grammar(testing::asset("shuttle/rels.ugr"));
    Grammar s = strip_features(g, FeatureSelection::list({"sort"}));
    REQUIRE(s.features.size() == 1);
    auto only_sort = [](const Category& c) {
      return std::all_of(c.constraints.begin(), c.constraints.end(), [](const auto& kv) { return kv.first == "sort"; });
    };
    for (const auto& r : s.rules) {
      CHECK(only_sort(r.mother));
      for (const auto& d : r.daughters) CHECK(only_sort(d));
    }
    for (const auto& e : s.lexicon) CHECK(only_sort(e.category));
  }

  TEST_CASE("demand-driven instantiation keeps only supported tuples") {
    Grammar g = parse_grammar(R"(feature agr syn {sg,pl}
feature sort syn {loc,time,dir}
start S
rule r: S -> NP:[agr=A, sort=T] VP:[agr=A]
lex "place": NP:[agr=sg, sort=loc]
lex "places": NP:[agr=pl, sort=loc]
lex "exists": VP:[agr=sg]
lex "exist": VP:[agr=pl]
)");
    Compilation c = compile(g);
    CHECK(c.stats.naive_count == "6");
    CHECK(inst_of(c, "r").tuples.size() == 2);
  }

  TEST_CASE("naive count is the product of slot domains") {
    Grammar g = parse_grammar(R"(feature agr syn {sg,pl}
feature sort syn {a,b,c,d,e,f,g,h,i,j,k}
start S
rule r: S -> NP:[agr=sg, sort=a]
lex "x": NP:[agr=sg, sort=a]
)");
    CHECK(compile(g).stats.naive_count == "22");
  }

  TEST_CASE("agreement grammar expands by hand") {
    Compilation c = compile(testing::fixture("agreement"));
    CHECK(c.stats.naive_count == "2");
    CHECK(c.stats.emitted_rules == 2);
    CHECK(c.stats.reduction_factor == "1.000");
    auto text = print_cfg(c.cfg);
    CHECK(text.rfind("s -> np__agr-sg vp__agr-sg | np__agr-pl vp__agr-pl ;\n", 0) == 0);
  }

  TEST_CASE("linked relative clause rule keeps four tuples") {
    Compilation linked = compile(testing::fixture("rel_linked"));
    CHECK(inst_of(linked, "rel_mod").tuples.size() == 4);
    CHECK(merged_of(linked, "rel_mod").size() == 4);
    Compilation unlinked = compile(testing::fixture("rel_unlinked"));
    CHECK(merged_of(unlinked, "rel_mod").size() == 1);
    auto rel_alts = [](const Compilation& c, const std::string& np) {
      std::size_t n = 0;
      for (const auto& alt : c.emitted.productions.at(np).alternatives)
        n += print_expr(alt).find("rel__") != std::string::npos;
      return n;
    };
    for (const char* np : {"np__agr-sg__sort-loc+time", "np__agr-pl__sort-loc+time"}) {
      CHECK(rel_alts(linked, np) == 2);
      CHECK(rel_alts(unlinked, np) == 1);
    }
    CHECK(rule_alternatives(unlinked.emitted) < rule_alternatives(linked.emitted));
    CHECK(print_cfg(unlinked.emitted).find("np__agr-sg+pl__sort-loc+time rel__agr-sg+pl__sort-loc+time") !=
          std::string::npos);
  }

  TEST_CASE("merge_ranges hand cases") {
    InstantiationSet inst;
    inst.rule_id = "r";
    inst.slots = {slot(0, {{0, 0}}, 2), slot(1, {{0, 1}}, 2)};
    inst.tuples = {{0, 0}, {1, 0}};
    auto m = merge_ranges(inst);
    REQUIRE(m.size() == 1);
    CHECK(m[0].values == std::vector<std::uint64_t>{3, 1});

    inst.tuples = {{0, 0}, {1, 1}};
    CHECK(merge_ranges(inst).size() == 2);

    inst.tuples = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    m = merge_ranges(inst);
    REQUIRE(m.size() == 1);
    CHECK(m[0].values == std::vector<std::uint64_t>{3, 3});

    inst.slots[0] = slot(0, {{1, 0}, {2, 0}}, 2);
    CHECK(inst.slots[0].linked());
    m = merge_ranges(inst);
    CHECK(m.size() == 2);
    for (const auto& x : m) CHECK(std::popcount(x.values[0]) == 1);
  }

  TEST_CASE("merge_ranges covers tuples exactly with disjoint rectangles") {
    std::mt19937 rng(testing::kSeed + 2);
    for (int round = 0; round < 300; ++round) {
      InstantiationSet inst;
      std::size_t n = 1 + rng() % 3;
      std::vector<std::size_t> dom;
      for (std::size_t s = 0; s < n; ++s) {
        dom.push_back(1 + rng() % 4);
        bool linked = rng() % 3 == 0;
        std::vector<std::pair<std::size_t, std::size_t>> occ{{1, s}};
        if (linked) occ.push_back({2, s});
        inst.slots.push_back(slot(s, occ, dom.back()));
      }
      std::set<std::vector<std::uint8_t>> chosen;
      std::vector<std::vector<std::uint8_t>> all{{}};
      for (auto d : dom) {
        std::vector<std::vector<std::uint8_t>> next;
        for (const auto& a : all)
          for (std::uint8_t v = 0; v < d; ++v) {
            auto b = a;
            b.push_back(v);
            next.push_back(b);
          }
        all = std::move(next);
      }
      for (const auto& t : all)
        if (rng() % 2) chosen.insert(t);
      if (chosen.empty()) chosen.insert(all.front());
      inst.tuples.assign(chosen.begin(), chosen.end());
      auto m = merge_ranges(inst);
      auto covered = points(m);
      CHECK(covered.size() == chosen.size());
      CHECK(std::set<std::vector<std::uint8_t>>(covered.begin(), covered.end()) == chosen);
      for (const auto& x : m)
        for (std::size_t s = 0; s < n; ++s)
          if (inst.slots[s].linked()) CHECK(std::popcount(x.values[s]) == 1);
    }
  }

  TEST_CASE("every kept tuple takes part in a complete derivation") {
    for (const char* name : {"agreement", "center", "rel_linked", "rel_unlinked"}) {
      CAPTURE(name);
      Grammar g = testing::fixture(name);
      auto ground = testing::ground_items(g, 12);
      auto matches = [&](const std::vector<std::pair<std::string, std::vector<int>>>& items, const std::string& sym,
                         const std::map<std::size_t, int>& fixed) {
        return std::any_of(items.begin(), items.end(), [&](const auto& it) {
          if (it.first != sym) return false;
          for (auto [f, v] : fixed)
            if (it.second[f] != v) return false;
          return true;
        });
      };
      for (const auto& inst : compute_instantiations(g)) {
        const Rule& r = *g.rule(inst.rule_id);
        for (const auto& t : inst.tuples) {
          std::vector<std::map<std::size_t, int>> fixed(r.daughters.size() + 1);
          for (std::size_t s = 0; s < inst.slots.size(); ++s)
            for (auto [p, k] : inst.slots[s].occurrences) fixed[p][inst.slots[s].feature] = t[s];
          CHECK(matches(ground.reachable, r.mother.symbol, fixed[0]));
          for (std::size_t d = 0; d < r.daughters.size(); ++d) CHECK(matches(ground.productive, r.daughters[d].symbol, fixed[d + 1]));
        }
      }
    }
  }

  TEST_CASE("compiled language equals the oracle language on fixtures") {
    for (const char* name : kFixtures) {
      CAPTURE(name);
      Grammar g = testing::fixture(name);
      Compilation c = compile(g);
      OracleEnumerateOptions o;
      o.feature_filter = syntactic(g);
      for (std::size_t L : {1, 4, 8}) {
        auto oracle = oracle_enumerate(g, L, o);
        CHECK(cfg_enumerate(c.emitted, L) == oracle);
        CHECK(cfg_enumerate(c.cfg, L) == oracle);
      }
    }
  }

  TEST_CASE("compiled language equals the oracle language on random grammars") {
    std::mt19937 rng(testing::kSeed + 3);
    int compared = 0;
    for (int i = 0; i < 300; ++i) {
      std::string src = testing::random_grammar_source(rng);
      Grammar g;
      try {
        g = parse_grammar(src);
      } catch (const GrammarError&) {
        continue;
      }
      CAPTURE(src);
      OracleEnumerateOptions o;
      o.feature_filter = syntactic(g);
      auto oracle = oracle_enumerate(g, 6, o);
      CHECK(oracle == testing::ground_language(g, 6, o.feature_filter));
      Compilation c;
      try {
        c = compile(g);
      } catch (const CompileError&) {
        CHECK(oracle_enumerate(g, 12, o).empty());
        continue;
      }
      CHECK_FALSE(has_left_recursion(c.cfg));
      CHECK(cfg_enumerate(c.cfg, 6) == oracle);
      CHECK(cfg_enumerate(c.emitted, 6) == oracle);
      ++compared;
    }
    CHECK(compared > 100);
  }

  TEST_CASE("direct left recursion") {
    auto cfg = testing::cfg_fixture("lr_direct");
    CHECK(has_left_recursion(cfg));
    auto out = eliminate_left_recursion(cfg);
    CHECK_FALSE(has_left_recursion(out));
    CHECK(cfg_enumerate(cfg, 3) == StringSet{"c", "c b", "c b b"});
    CHECK(cfg_enumerate(out, 3) == StringSet{"c", "c b", "c b b"});
    CHECK(cfg_enumerate(out, 6) == cfg_enumerate(cfg, 6));
  }

  TEST_CASE("indirect left recursion") {
    auto cfg = testing::cfg_fixture("lr_indirect");
    CHECK(has_left_recursion(cfg));
    auto out = eliminate_left_recursion(cfg);
    CHECK_FALSE(has_left_recursion(out));
    CHECK(cfg_enumerate(out, 6) == cfg_enumerate(cfg, 6));
    CHECK(cfg_enumerate(out, 6).size() > 4);
  }

  TEST_CASE("grammars without left recursion come back unchanged") {
    for (const char* name : {"seq", "star", "intj"}) {
      auto cfg = testing::cfg_fixture(name);
      CHECK(eliminate_left_recursion(cfg) == cfg);
      CHECK(print_cfg(eliminate_left_recursion(cfg)) == print_cfg(cfg));
    }
  }

  TEST_CASE("left-recursive unification grammar compiles to a right-recursive cfg") {
    Compilation c = compile(testing::fixture("left_rec"));
    CHECK(has_left_recursion(c.emitted));
    CHECK_FALSE(has_left_recursion(c.cfg));
    CHECK(cfg_enumerate(c.cfg, 3) == StringSet{"c", "c b", "c b b"});
  }

  TEST_CASE("compilation is deterministic") {
    for (const char* file : {"rels.ugr", "unlinked.ugr"}) {
      Grammar g = load_grammar(testing::asset(std::string("shuttle/") + file));
      CHECK(print_cfg(compile(g).cfg) == print_cfg(compile(g).cfg));
    }
  }

  TEST_CASE("nonterminal names are mnemonic") {
    Grammar g = testing::fixture("rel_linked");
    CHECK(nonterminal_name(g, "NP", {0, 1}, {1, 3}) == "np__agr-sg__sort-loc+time");
  }

  TEST_CASE("shuttle reduction factor") {
    Compilation c = compile(load_grammar(testing::asset("shuttle/rels.ugr")));
    CHECK(c.stats.reduction_log10 >= 3.0);
  }

  TEST_CASE("tuple cap is enforced") {
    CompileLimits lim;
    lim.tuple_cap = 3;
    CHECK_THROWS_AS(compile(load_grammar(testing::asset("shuttle/rels.ugr")), {}, lim), ResourceLimitError);
  }
}
