#include "ugc/compiler.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ugc {
namespace {

using Mask = std::uint64_t;
using Ground = std::vector<std::uint8_t>;

Mask full_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

Mask constraint_mask(const Constraint& c, const FeatureDecl& decl) {
  if (c.kind == Constraint::Kind::Var) return full_mask(decl.domain.size());
  Mask m = 0;
  for (const auto& v : c.values) m |= Mask{1} << *decl.index_of(v);
  return m;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// Expands a per-dimension mask rectangle into its ground points.
void for_each_point(const std::vector<Mask>& rect, const std::function<void(const Ground&)>& fn) {
  Ground g(rect.size());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == rect.size()) {
      fn(g);
      return;
    }
    for (std::size_t v = 0; v < 64; ++v)
      if (rect[k] >> v & 1) {
        g[k] = static_cast<std::uint8_t>(v);
        rec(k + 1);
      }
  };
  rec(0);
}

class DimCache {
 public:
  explicit DimCache(const Grammar& g) : g_(g) {}
  const std::vector<std::size_t>& operator()(const std::string& sym) {
    auto it = cache_.find(sym);
    if (it == cache_.end()) it = cache_.emplace(sym, naming_dimensions(g_, sym)).first;
    return it->second;
  }

 private:
  const Grammar& g_;
  std::map<std::string, std::vector<std::size_t>> cache_;
};

const Category& position(const Rule& r, std::size_t p) { return p == 0 ? r.mother : r.daughters[p - 1]; }

// Slot index for every (position, dimension) of a rule.
std::vector<std::vector<std::size_t>> slot_map(const InstantiationSet& inst, std::size_t positions) {
  std::vector<std::vector<std::size_t>> out(positions);
  for (std::size_t s = 0; s < inst.slots.size(); ++s)
    for (auto [p, k] : inst.slots[s].occurrences) {
      if (out[p].size() <= k) out[p].resize(k + 1);
      out[p][k] = s;
    }
  return out;
}

}  // namespace

std::vector<std::string> selected_features(const Grammar& grammar, const FeatureSelection& sel) {
  std::vector<std::string> out;
  switch (sel.mode) {
    case FeatureSelection::Mode::All:
      for (const auto& f : grammar.features) out.push_back(f.name);
      break;
    case FeatureSelection::Mode::Syntactic:
      for (const auto& f : grammar.features)
        if (f.kind == FeatureKind::Syntactic) out.push_back(f.name);
      break;
    case FeatureSelection::Mode::List: {
      std::vector<Diagnostic> bad;
      for (const auto& n : sel.names)
        if (!grammar.feature(n))
          bad.push_back(Diagnostic{0, 0, "unknown-feature", n, "selected feature is not declared"});
      if (!bad.empty()) throw GrammarError(std::move(bad));
      for (const auto& f : grammar.features)
        if (std::find(sel.names.begin(), sel.names.end(), f.name) != sel.names.end())
          out.push_back(f.name);
      break;
    }
  }
  return out;
}

Grammar strip_features(const Grammar& grammar, const FeatureSelection& sel) {
  auto kept = selected_features(grammar, sel);
  std::set<std::string> keep(kept.begin(), kept.end());
  Grammar out = grammar;
  std::erase_if(out.features, [&](const FeatureDecl& f) { return !keep.count(f.name); });
  auto strip = [&](Category& c) {
    std::erase_if(c.constraints, [&](const auto& kv) { return !keep.count(kv.first); });
  };
  for (auto& r : out.rules) {
    strip(r.mother);
    for (auto& d : r.daughters) strip(d);
  }
  for (auto& e : out.lexicon) strip(e.category);
  return out;
}

std::vector<std::size_t> naming_dimensions(const Grammar& grammar, const std::string& symbol) {
  std::set<std::size_t> dims;
  auto note = [&](const Category& c) {
    if (c.symbol != symbol) return;
    for (const auto& [name, _] : c.constraints)
      if (auto idx = grammar.feature_index(name)) dims.insert(*idx);
  };
  for (const auto& r : grammar.rules) {
    note(r.mother);
    for (const auto& d : r.daughters) note(d);
  }
  for (const auto& e : grammar.lexicon) note(e.category);
  return {dims.begin(), dims.end()};
}

std::vector<InstantiationSet> rule_slots(const Grammar& grammar) {
  DimCache dims(grammar);
  std::vector<InstantiationSet> out;
  for (const auto& r : grammar.rules) {
    InstantiationSet inst;
    inst.rule_id = r.id;
    std::map<std::string, std::size_t> var_slot;
    for (std::size_t p = 0; p <= r.daughters.size(); ++p) {
      const Category& cat = position(r, p);
      const auto& d = dims(cat.symbol);
      for (std::size_t k = 0; k < d.size(); ++k) {
        const FeatureDecl& decl = grammar.features[d[k]];
        const Constraint* c = cat.find(decl.name);
        if (c && c->kind == Constraint::Kind::Var) {
          auto [it, inserted] = var_slot.emplace(c->var, inst.slots.size());
          if (inserted) {
            Slot s;
            s.feature = d[k];
            s.var = c->var;
            s.allowed = full_mask(decl.domain.size());
            inst.slots.push_back(s);
          }
          inst.slots[it->second].occurrences.emplace_back(p, k);
        } else {
          Slot s;
          s.feature = d[k];
          s.allowed = c ? constraint_mask(*c, decl) : full_mask(decl.domain.size());
          s.occurrences.emplace_back(p, k);
          inst.slots.push_back(s);
        }
      }
    }
    std::stable_sort(inst.slots.begin(), inst.slots.end(), [](const Slot& a, const Slot& b) {
      if (a.feature != b.feature) return a.feature < b.feature;
      return a.occurrences.front() < b.occurrences.front();
    });
    out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

class Instantiator {
 public:
  Instantiator(const Grammar& g, const CompileLimits& limits)
      : g_(g), limits_(limits), dims_(g), sets_(rule_slots(g)) {
    for (std::size_t ri = 0; ri < g.rules.size(); ++ri)
      maps_.push_back(slot_map(sets_[ri], g.rules[ri].daughters.size() + 1));
  }

  std::vector<InstantiationSet> run() {
    // Bottom-up support.
    for (const auto& e : g_.lexicon) {
      std::vector<Mask> rect = lexical_rect(e);
      for_each_point(rect, [&](const Ground& gr) { sup_[e.category.symbol].insert(gr); });
    }
    std::vector<std::vector<Ground>> tuples(g_.rules.size());
    bool changed = true;
    while (changed) {
      changed = false;
      std::size_t total = 0;
      for (std::size_t ri = 0; ri < g_.rules.size(); ++ri) {
        tuples[ri].clear();
        enumerate(ri, tuples[ri], total);
      }
      for (std::size_t ri = 0; ri < g_.rules.size(); ++ri)
        for (const auto& t : tuples[ri])
          if (sup_[g_.rules[ri].mother.symbol].insert(project(ri, 0, t)).second) changed = true;
    }

    // Top-down demand over supported tuples. A supported tuple whose mother
    // is demanded has supported daughters, so one round of each reaches the
    // joint fixpoint.
    std::vector<std::map<Ground, std::vector<std::size_t>>> by_mother(g_.rules.size());
    for (std::size_t ri = 0; ri < g_.rules.size(); ++ri)
      for (std::size_t t = 0; t < tuples[ri].size(); ++t)
        by_mother[ri][project(ri, 0, tuples[ri][t])].push_back(t);

    std::set<std::pair<std::string, Ground>> demanded;
    std::deque<std::pair<std::string, Ground>> work;
    for (const auto& gr : sup_[g_.start]) {
      demanded.emplace(g_.start, gr);
      work.emplace_back(g_.start, gr);
    }
    if (work.empty())
      throw CompileError("start symbol '" + g_.start + "' derives no terminal string");
    std::vector<std::set<std::size_t>> retained(g_.rules.size());
    while (!work.empty()) {
      auto [sym, gr] = work.front();
      work.pop_front();
      for (std::size_t ri = 0; ri < g_.rules.size(); ++ri) {
        const Rule& r = g_.rules[ri];
        if (r.mother.symbol != sym) continue;
        auto it = by_mother[ri].find(gr);
        if (it == by_mother[ri].end()) continue;
        for (std::size_t t : it->second) {
          if (!retained[ri].insert(t).second) continue;
          for (std::size_t p = 1; p <= r.daughters.size(); ++p) {
            auto key = std::make_pair(r.daughters[p - 1].symbol, project(ri, p, tuples[ri][t]));
            if (demanded.insert(key).second) work.push_back(key);
          }
        }
      }
    }

    for (std::size_t ri = 0; ri < g_.rules.size(); ++ri) {
      for (std::size_t t : retained[ri]) sets_[ri].tuples.push_back(tuples[ri][t]);
      std::sort(sets_[ri].tuples.begin(), sets_[ri].tuples.end());
    }
    return std::move(sets_);
  }

 private:
  std::vector<Mask> lexical_rect(const LexEntry& e) {
    const auto& d = dims_(e.category.symbol);
    std::vector<Mask> rect;
    for (std::size_t f : d) {
      const FeatureDecl& decl = g_.features[f];
      const Constraint* c = e.category.find(decl.name);
      rect.push_back(c ? constraint_mask(*c, decl) : full_mask(decl.domain.size()));
    }
    return rect;
  }

  Ground project(std::size_t ri, std::size_t p, const Ground& tuple) const {
    Ground out;
    for (std::size_t s : maps_[ri][p]) out.push_back(tuple[s]);
    return out;
  }

  void enumerate(std::size_t ri, std::vector<Ground>& out, std::size_t& total) {
    const Rule& r = g_.rules[ri];
    const InstantiationSet& inst = sets_[ri];
    const auto& map = maps_[ri];
    std::vector<int> assigned(inst.slots.size(), -1);

    std::function<void(std::size_t)> mother_free;
    std::vector<std::size_t> free_slots;
    for (std::size_t s : map[0])
      if (std::find(free_slots.begin(), free_slots.end(), s) == free_slots.end())
        free_slots.push_back(s);

    std::function<void(std::size_t)> finish = [&](std::size_t i) {
      if (i == free_slots.size()) {
        Ground t(assigned.begin(), assigned.end());
        out.push_back(std::move(t));
        if (++total > limits_.tuple_cap) throw ResourceLimitError("instantiation tuples", limits_.tuple_cap);
        return;
      }
      std::size_t s = free_slots[i];
      if (assigned[s] >= 0) {
        finish(i + 1);
        return;
      }
      for (std::size_t v = 0; v < 64; ++v)
        if (inst.slots[s].allowed >> v & 1) {
          assigned[s] = static_cast<int>(v);
          finish(i + 1);
        }
      assigned[s] = -1;
    };

    std::function<void(std::size_t)> daughter = [&](std::size_t p) {
      if (p > r.daughters.size()) {
        finish(0);
        return;
      }
      auto it = sup_.find(r.daughters[p - 1].symbol);
      if (it == sup_.end()) return;
      const auto& slots = map[p];
      for (const Ground& gr : it->second) {
        std::vector<std::size_t> bound;
        bool ok = true;
        for (std::size_t k = 0; k < slots.size() && ok; ++k) {
          std::size_t s = slots[k];
          if (!(inst.slots[s].allowed >> gr[k] & 1)) ok = false;
          else if (assigned[s] < 0) {
            assigned[s] = gr[k];
            bound.push_back(s);
          } else if (assigned[s] != gr[k]) {
            ok = false;
          }
        }
        if (ok) daughter(p + 1);
        for (std::size_t s : bound) assigned[s] = -1;
      }
    };
    daughter(1);
  }

  const Grammar& g_;
  CompileLimits limits_;
  DimCache dims_;
  std::vector<InstantiationSet> sets_;
  std::vector<std::vector<std::vector<std::size_t>>> maps_;
  std::map<std::string, std::set<Ground>> sup_;
};

}  // namespace

std::vector<InstantiationSet> compute_instantiations(const Grammar& grammar,
                                                     const CompileLimits& limits) {
  return Instantiator(grammar, limits).run();
}

// ---------------------------------------------------------------------------
// Range merging

std::vector<MergedInstance> merge_ranges(const InstantiationSet& inst) {
  std::vector<MergedInstance> cur;
  for (const auto& t : inst.tuples) {
    MergedInstance m;
    for (auto v : t) m.values.push_back(Mask{1} << v);
    cur.push_back(std::move(m));
  }
  auto lex_less = [](const MergedInstance& a, const MergedInstance& b) { return a.values < b.values; };
  std::sort(cur.begin(), cur.end(), lex_less);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < inst.slots.size(); ++s) {
      if (inst.slots[s].linked()) continue;
      // Group instances that agree on every other slot.
      std::map<std::vector<Mask>, std::size_t> group;
      std::vector<MergedInstance> next;
      for (const auto& m : cur) {
        std::vector<Mask> key = m.values;
        key[s] = 0;
        auto [it, inserted] = group.emplace(std::move(key), next.size());
        if (inserted) {
          next.push_back(m);
        } else {
          next[it->second].values[s] |= m.values[s];
          changed = true;
        }
      }
      std::sort(next.begin(), next.end(), lex_less);
      cur = std::move(next);
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Emission

std::string nonterminal_name(const Grammar& grammar, const std::string& symbol,
                             const std::vector<std::size_t>& dims,
                             const std::vector<std::uint64_t>& values) {
  std::string name = lower(symbol);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const FeatureDecl& decl = grammar.features[dims[k]];
    name += "__" + decl.name + "-";
    bool first = true;
    for (std::size_t v = 0; v < decl.domain.size(); ++v)
      if (values[k] >> v & 1) {
        if (!first) name += '+';
        name += decl.domain[v];
        first = false;
      }
  }
  return name;
}

namespace {

struct RuleAlt {
  const MergedInstance* inst;
  const std::vector<std::vector<std::size_t>>* map;  // slot per (position, dimension)
  const Rule* rule;
};

bool intersects(const std::vector<Mask>& a, const std::vector<Mask>& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k] & b[k])) return false;
  return true;
}

}  // namespace

ContextFreeGrammar emit_cfg(const Grammar& grammar, const std::vector<InstantiationSet>& inst,
                            const std::vector<std::vector<MergedInstance>>& merged) {
  DimCache dims(grammar);
  std::vector<std::vector<std::vector<std::size_t>>> maps;
  for (std::size_t ri = 0; ri < grammar.rules.size(); ++ri)
    maps.push_back(slot_map(inst[ri], grammar.rules[ri].daughters.size() + 1));
  std::map<std::string, std::vector<RuleAlt>> alts_by_symbol;
  for (std::size_t ri = 0; ri < grammar.rules.size(); ++ri)
    for (const auto& m : merged[ri])
      alts_by_symbol[grammar.rules[ri].mother.symbol].push_back(RuleAlt{&m, &maps[ri], &grammar.rules[ri]});

  struct LexAlt {
    std::vector<Mask> rect;
    const LexEntry* entry;
  };
  std::map<std::string, std::vector<LexAlt>> lex_by_symbol;
  for (const auto& e : grammar.lexicon) {
    std::vector<Mask> rect;
    for (std::size_t f : dims(e.category.symbol)) {
      const FeatureDecl& decl = grammar.features[f];
      const Constraint* c = e.category.find(decl.name);
      rect.push_back(c ? constraint_mask(*c, decl) : full_mask(decl.domain.size()));
    }
    lex_by_symbol[e.category.symbol].push_back(LexAlt{std::move(rect), &e});
  }

  ContextFreeGrammar cfg;
  std::deque<std::pair<std::string, std::vector<Mask>>> work;
  std::set<std::string> seen;
  auto reference = [&](const std::string& sym, const std::vector<Mask>& rect) {
    std::string name = nonterminal_name(grammar, sym, dims(sym), rect);
    if (seen.insert(name).second) work.emplace_back(sym, rect);
    return name;
  };

  // The start nonterminal covers every retained instantiation of the start symbol.
  const auto& start_dims = dims(grammar.start);
  if (start_dims.empty()) {
    cfg.start = reference(grammar.start, {});
  } else {
    std::set<std::vector<Mask>> points;
    for (const auto& a : alts_by_symbol[grammar.start]) {
      std::vector<Mask> mother;
      for (std::size_t s : (*a.map)[0]) mother.push_back(a.inst->values[s]);
      for_each_point(mother, [&](const Ground& g) {
        std::vector<Mask> p;
        for (auto v : g) p.push_back(Mask{1} << v);
        points.insert(p);
      });
    }
    cfg.start = lower(grammar.start);
    seen.insert(cfg.start);
    Production top;
    for (const auto& p : points) top.add(Expr::ref(reference(grammar.start, p)), Origin::Range);
    cfg.productions[cfg.start] = std::move(top);
  }

  while (!work.empty()) {
    auto [sym, rect] = work.front();
    work.pop_front();
    std::string name = nonterminal_name(grammar, sym, dims(sym), rect);
    Production prod;
    for (const auto& a : alts_by_symbol[sym]) {
      // Narrow the instance to the part whose mother lies inside `rect`.
      std::vector<Mask> w = a.inst->values;
      const auto& map = *a.map;
      for (std::size_t k = 0; k < map[0].size(); ++k) w[map[0][k]] &= rect[k];
      if (std::any_of(w.begin(), w.end(), [](Mask m) { return m == 0; })) continue;
      std::vector<Expr> items;
      for (std::size_t p = 1; p < map.size(); ++p) {
        std::vector<Mask> drect;
        for (std::size_t s : map[p]) drect.push_back(w[s]);
        items.push_back(Expr::ref(reference(a.rule->daughters[p - 1].symbol, drect)));
      }
      prod.add(items.size() == 1 ? std::move(items.front()) : Expr::seq(std::move(items)), Origin::Rule);
    }
    std::vector<Expr> surfaces;
    std::set<std::vector<std::string>> dup;
    for (const auto& l : lex_by_symbol[sym]) {
      if (!intersects(l.rect, rect) || !dup.insert(l.entry->surface).second) continue;
      std::vector<Expr> toks;
      for (const auto& t : l.entry->surface) toks.push_back(Expr::terminal(t));
      surfaces.push_back(toks.size() == 1 ? std::move(toks.front()) : Expr::seq(std::move(toks)));
    }
    if (surfaces.size() == 1) prod.add(std::move(surfaces.front()), Origin::Lexicon);
    else if (surfaces.size() > 1) prod.add(Expr::alt(std::move(surfaces)), Origin::Lexicon);
    cfg.productions[name] = std::move(prod);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Statistics

std::string ExpansionStats::str() const {
  std::ostringstream os;
  os << "naive_count=" << naive_count << "\n"
     << "emitted_rules=" << emitted_rules << "\n"
     << "reduction_factor=" << reduction_factor << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", reduction_log10);
  os << "reduction_log10=" << buf << "\n";
  return os.str();
}

ExpansionStats expansion_stats(const Grammar& grammar, const ContextFreeGrammar& cfg) {
  using boost::multiprecision::cpp_int;
  cpp_int naive = 0;
  for (const auto& inst : rule_slots(grammar)) {
    cpp_int prod = 1;
    for (const auto& s : inst.slots) prod *= grammar.features[s.feature].domain.size();
    naive += prod;
  }
  ExpansionStats st;
  for (const auto& [_, p] : cfg.productions)
    for (Origin o : p.origins)
      if (o == Origin::Rule) ++st.emitted_rules;
  st.naive_count = naive.str();
  std::size_t denom = std::max<std::size_t>(st.emitted_rules, 1);
  // Decimal with three fractional digits, computed exactly.
  cpp_int scaled = naive * 1000 / denom;
  std::string digits = scaled.str();
  while (digits.size() < 4) digits.insert(digits.begin(), '0');
  st.reduction_factor = digits.substr(0, digits.size() - 3) + "." + digits.substr(digits.size() - 3);
  st.reduction_log10 = std::log10(naive.convert_to<double>()) - std::log10(static_cast<double>(denom));
  return st;
}

Compilation compile(const Grammar& grammar, const FeatureSelection& sel,
                    const CompileLimits& limits) {
  Compilation c;
  c.grammar = strip_features(grammar, sel);
  c.instantiations = compute_instantiations(c.grammar, limits);
  for (const auto& inst : c.instantiations) c.merged.push_back(merge_ranges(inst));
  c.emitted = emit_cfg(c.grammar, c.instantiations, c.merged);
  c.stats = expansion_stats(c.grammar, c.emitted);
  c.cfg = eliminate_left_recursion(c.emitted);
  return c;
}

}  // namespace ugc
