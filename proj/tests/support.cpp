#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace testing {

using ugc::Category;
using ugc::Constraint;
using ugc::Grammar;

std::string asset(const std::string& relative) { return std::string(UGC_ASSET_DIR) + "/" + relative; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Grammar fixture(const std::string& name) { return ugc::load_grammar(asset("fixtures/" + name + ".ugr")); }

ugc::ContextFreeGrammar cfg_fixture(const std::string& name) {
  return ugc::load_cfg(asset("fixtures/" + name + ".cfg"));
}

namespace {

using Item = std::pair<std::string, std::vector<int>>;
using Words = std::vector<std::string>;

struct Grounding {
  const Grammar& g;
  std::vector<std::string> kept;  // feature names in declaration order
  std::vector<int> size;

  Grounding(const Grammar& grammar, const ugc::FeatureFilter& filter) : g(grammar) {
    for (const auto& f : g.features)
      if (!filter || std::count(filter->begin(), filter->end(), f.name)) {
        kept.push_back(f.name);
        size.push_back(static_cast<int>(f.domain.size()));
      }
  }

  int value_index(const std::string& feature, const std::string& value) const {
    const auto& dom = g.feature(feature)->domain;
    return static_cast<int>(std::find(dom.begin(), dom.end(), value) - dom.begin());
  }

  // Allowed values per kept feature of one category under a variable binding.
  std::vector<std::vector<int>> allowed(const Category& c, const std::map<std::string, int>& env) const {
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      std::vector<int> vals;
      auto it = c.constraints.find(kept[i]);
      if (it == c.constraints.end()) {
        for (int v = 0; v < size[i]; ++v) vals.push_back(v);
      } else if (it->second.kind == Constraint::Kind::Var) {
        vals.push_back(env.at(it->second.var));
      } else {
        for (const auto& v : it->second.values) vals.push_back(value_index(kept[i], v));
      }
      out.push_back(vals);
    }
    return out;
  }

  static std::vector<std::vector<int>> product(const std::vector<std::vector<int>>& sets) {
    std::vector<std::vector<int>> acc{{}};
    for (const auto& s : sets) {
      std::vector<std::vector<int>> next;
      for (const auto& a : acc)
        for (int v : s) {
          auto b = a;
          b.push_back(v);
          next.push_back(b);
        }
      acc = std::move(next);
    }
    return acc;
  }

  // Every binding of the rule's variables that sit on kept features.
  std::vector<std::map<std::string, int>> bindings(const ugc::Rule& r) const {
    std::map<std::string, int> domain;
    auto scan = [&](const Category& c) {
      for (const auto& [f, con] : c.constraints)
        if (con.kind == Constraint::Kind::Var) {
          auto k = std::find(kept.begin(), kept.end(), f);
          if (k != kept.end()) domain[con.var] = size[static_cast<std::size_t>(k - kept.begin())];
        }
    };
    scan(r.mother);
    for (const auto& d : r.daughters) scan(d);
    std::vector<std::map<std::string, int>> out{{}};
    for (const auto& [var, n] : domain) {
      std::vector<std::map<std::string, int>> next;
      for (const auto& e : out)
        for (int v = 0; v < n; ++v) {
          auto b = e;
          b[var] = v;
          next.push_back(b);
        }
      out = std::move(next);
    }
    return out;
  }
};

// Strings (as token vectors) of every ground item up to max_len tokens.
std::map<Item, std::set<Words>> ground_strings(const Grounding& gr, std::size_t max_len) {
  std::map<Item, std::set<Words>> lang;
  for (const auto& e : gr.g.lexicon) {
    if (e.surface.size() > max_len) continue;
    for (const auto& vals : Grounding::product(gr.allowed(e.category, {})))
      lang[{e.category.symbol, vals}].insert(e.surface);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : gr.g.rules)
      for (const auto& env : gr.bindings(r)) {
        std::vector<std::set<Words>> parts;
        for (const auto& d : r.daughters) {
          std::set<Words> u;
          for (const auto& vals : Grounding::product(gr.allowed(d, env))) {
            auto it = lang.find({d.symbol, vals});
            if (it != lang.end()) u.insert(it->second.begin(), it->second.end());
          }
          parts.push_back(std::move(u));
        }
        std::set<Words> acc{{}};
        for (const auto& p : parts) {
          std::set<Words> next;
          for (const auto& a : acc)
            for (const auto& s : p) {
              if (a.size() + s.size() > max_len) continue;
              Words w = a;
              w.insert(w.end(), s.begin(), s.end());
              next.insert(std::move(w));
            }
          acc = std::move(next);
        }
        if (acc.empty()) continue;
        for (const auto& vals : Grounding::product(gr.allowed(r.mother, env))) {
          auto& dst = lang[{r.mother.symbol, vals}];
          for (const auto& s : acc) changed |= dst.insert(s).second;
        }
      }
  }
  return lang;
}

}  // namespace

ugc::StringSet ground_language(const Grammar& g, std::size_t max_len, const ugc::FeatureFilter& filter) {
  Grounding gr(g, filter);
  auto lang = ground_strings(gr, max_len);
  std::set<std::string> out;
  for (const auto& [item, strs] : lang)
    if (item.first == g.start)
      for (const auto& s : strs)
        if (!s.empty()) out.insert(ugc::join_tokens(s));
  return {out.begin(), out.end()};
}

GroundItems ground_items(const Grammar& g, std::size_t max_len) {
  Grounding gr(g, std::nullopt);
  auto lang = ground_strings(gr, max_len);
  std::set<Item> productive, reachable;
  for (const auto& [item, strs] : lang)
    if (!strs.empty()) productive.insert(item);
  for (const auto& item : productive)
    if (item.first == g.start) reachable.insert(item);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules)
      for (const auto& env : gr.bindings(r)) {
        bool mother_ok = false;
        for (const auto& vals : Grounding::product(gr.allowed(r.mother, env)))
          mother_ok |= reachable.count({r.mother.symbol, vals}) > 0;
        if (!mother_ok) continue;
        std::vector<std::vector<Item>> live;
        for (const auto& d : r.daughters) {
          std::vector<Item> items;
          for (const auto& vals : Grounding::product(gr.allowed(d, env)))
            if (productive.count({d.symbol, vals})) items.push_back({d.symbol, vals});
          live.push_back(items);
        }
        if (std::any_of(live.begin(), live.end(), [](const auto& v) { return v.empty(); })) continue;
        for (const auto& items : live)
          for (const auto& item : items) changed |= reachable.insert(item).second;
      }
  }
  GroundItems out;
  out.features = gr.kept;
  out.productive.assign(productive.begin(), productive.end());
  out.reachable.assign(reachable.begin(), reachable.end());
  return out;
}

ugc::StringSet all_sequences(const std::vector<std::string>& vocab, std::size_t max_len) {
  std::set<std::string> out;
  std::vector<std::string> layer{""};
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& p : layer)
      for (const auto& w : vocab) next.push_back(p.empty() ? w : p + " " + w);
    out.insert(next.begin(), next.end());
    layer = std::move(next);
  }
  return {out.begin(), out.end()};
}

double path_probability(const ugc::PfsgSet& set, const ugc::Tokens& tokens) {
  // Map from end position to probability mass of reaching it.
  std::function<std::map<std::size_t, double>(const ugc::Pfsg&, std::size_t, std::size_t)> walk =
      [&](const ugc::Pfsg& g, std::size_t node, std::size_t pos) {
        std::map<std::size_t, double> out;
        if (node == g.end) out[pos] += 1.0;
        for (const auto& t : g.transitions) {
          if (t.from != node) continue;
          if (!t.ref) {
            if (pos < tokens.size() && tokens[pos] == t.label)
              for (auto [p, pr] : walk(g, t.to, pos + 1)) out[p] += t.prob * pr;
            continue;
          }
          const auto& sub = set.graphs.at(t.label);
          for (auto [mid, pr] : walk(sub, sub.start, pos))
            for (auto [p, rest] : walk(g, t.to, mid)) out[p] += t.prob * pr * rest;
        }
        return out;
      };
  const auto& top = set.graphs.at(set.top);
  auto ends = walk(top, top.start, 0);
  auto it = ends.find(tokens.size());
  return it == ends.end() ? 0.0 : it->second;
}

std::string random_grammar_source(std::mt19937& rng, bool left_recursion_allowed) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint32_t>(n)); };
  struct Feat {
    const char* name;
    const char* var;
    std::vector<std::string> dom;
  };
  const std::vector<Feat> feats = {{"f", "F", {"p", "q"}}, {"g", "G", {"u", "v", "w"}}, {"h", "H", {"k", "l"}}};
  auto constraints = [&](bool vars) {
    std::vector<std::string> parts;
    for (const auto& f : feats) {
      int roll = pick(10);
      if (roll < 5) continue;
      if (roll < 7) {
        parts.push_back(std::string(f.name) + "=" + f.dom[static_cast<std::size_t>(pick(static_cast<int>(f.dom.size())))]);
      } else if (roll < 8) {
        parts.push_back(std::string(f.name) + "={" + f.dom[0] + ", " + f.dom[1] + "}");
      } else if (vars) {
        parts.push_back(std::string(f.name) + "=" + f.var);
      }
    }
    if (parts.empty()) return std::string();
    std::string s = ":[";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
    return s + "]";
  };

  std::ostringstream out;
  out << "feature f syn { p, q }\nfeature g syn { u, v, w }\nfeature h sem { k, l }\nstart S\n";
  const char* nts[] = {"S", "A", "B"};
  const char* all[] = {"S", "A", "B", "X", "Y"};
  std::set<std::string> mothers, used;
  int n_rules = 2 + pick(4);
  for (int i = 0; i < n_rules; ++i) {
    std::string mother = i == 0 ? "S" : nts[pick(3)];
    int n_d = 1 + pick(3);
    out << "rule r" << i << ": " << mother << constraints(true) << " ->";
    for (int d = 0; d < n_d; ++d) {
      std::string sym = (n_d == 1 || (d == 0 && !left_recursion_allowed)) ? all[3 + pick(2)] : all[pick(5)];
      used.insert(sym);
      out << " " << sym << constraints(true);
    }
    out << "\n";
    mothers.insert(mother);
  }
  int extra = 0;
  for (const char* s : {"A", "B"})
    if (used.count(s) && !mothers.count(s)) out << "rule fill" << extra++ << ": " << s << " -> X" << constraints(false) << "\n";
  const char* toks[] = {"a", "b", "c"};
  for (const char* pre : {"X", "Y"}) {
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) {
      std::string surface = toks[pick(3)];
      if (pick(5) == 0) surface += std::string(" ") + toks[pick(3)];
      out << "lex \"" << surface << "\": " << pre << constraints(false) << "\n";
    }
  }
  return out.str();
}

}  // namespace testing
