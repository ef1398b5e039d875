// Reference recognizer working on flat feature structures with reentrancy.
//
// An item's feature structure covers the features relevant to its symbol
// (those constrained on it anywhere). Features are grouped into classes that
// must share a value, and each class carries the set of values still allowed.
#include "ugc/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ugc {
namespace {

using Mask = std::uint64_t;

Mask full_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

struct Fs {
  std::vector<std::uint8_t> cls;  // class per relevant feature
  std::vector<Mask> sets;         // allowed values per class
  auto operator<=>(const Fs&) const = default;
};

// Per-position constraint compiled against the symbol's relevant features.
struct Spec {
  enum Kind : std::uint8_t { None, Const, Var };
  std::vector<Kind> kind;
  std::vector<Mask> set;
  std::vector<int> var;
};

struct CRule {
  std::size_t index;
  int mother;
  Spec mspec;
  std::vector<int> dsym;
  std::vector<Spec> dspec;
  std::vector<Mask> var_full;
};

struct CLex {
  std::size_t index;
  int sym;
  std::vector<int> toks;
  Fs fs;
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  return std::min(cap, a + b < a ? cap : a + b);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(cap, a * b);
}

class Model {
 public:
  Model(const Grammar& g, const FeatureFilter& filter) : g_(g) {
    keep_.assign(g.features.size(), !filter.has_value());
    if (filter) {
      for (const auto& name : *filter) {
        auto idx = g.feature_index(name);
        if (!idx)
          throw GrammarError({Diagnostic{0, 0, "unknown-feature", name,
                                         "feature filter names an undeclared feature"}});
        keep_[*idx] = true;
      }
    }
    auto note = [&](const Category& cat) {
      int s = symbol(cat.symbol);
      for (const auto& [fname, c] : cat.constraints) {
        auto idx = g.feature_index(fname);
        if (idx && keep_[*idx]) feats_[s].push_back(static_cast<int>(*idx));
      }
    };
    for (const auto& r : g.rules) {
      note(r.mother);
      for (const auto& d : r.daughters) note(d);
    }
    for (const auto& e : g.lexicon) note(e.category);
    for (auto& fl : feats_) {
      std::sort(fl.begin(), fl.end());
      fl.erase(std::unique(fl.begin(), fl.end()), fl.end());
    }
    start_ = symbol(g.start);

    for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
      const Rule& r = g.rules[ri];
      CRule cr;
      cr.index = ri;
      std::map<std::string, int> vars;
      cr.mother = symbol(r.mother.symbol);
      cr.mspec = spec(r.mother, vars, cr.var_full);
      for (const auto& d : r.daughters) {
        cr.dsym.push_back(symbol(d.symbol));
        cr.dspec.push_back(spec(d, vars, cr.var_full));
      }
      rules_.push_back(std::move(cr));
    }
    for (std::size_t ei = 0; ei < g.lexicon.size(); ++ei) {
      const LexEntry& e = g.lexicon[ei];
      CLex cl;
      cl.index = ei;
      cl.sym = symbol(e.category.symbol);
      for (const auto& t : e.surface) cl.toks.push_back(word(t));
      std::map<std::string, int> none;
      std::vector<Mask> unused;
      Spec sp = spec(e.category, none, unused);
      for (std::size_t k = 0; k < sp.kind.size(); ++k) {
        cl.fs.cls.push_back(static_cast<std::uint8_t>(k));
        cl.fs.sets.push_back(sp.kind[k] == Spec::Const ? sp.set[k] : full(s_feat(cl.sym, k)));
      }
      lex_.push_back(std::move(cl));
    }
  }

  int symbol(const std::string& name) {
    auto [it, inserted] = sym_id_.emplace(name, static_cast<int>(sym_name_.size()));
    if (inserted) {
      sym_name_.push_back(name);
      feats_.emplace_back();
    }
    return it->second;
  }

  int word(const std::string& w) {
    auto [it, inserted] = vocab_.emplace(w, static_cast<int>(words_.size()));
    if (inserted) words_.push_back(w);
    return it->second;
  }

  std::optional<int> find_word(const std::string& w) const {
    auto it = vocab_.find(w);
    if (it == vocab_.end()) return std::nullopt;
    return it->second;
  }

  int s_feat(int sym, std::size_t k) const { return feats_[sym][k]; }
  Mask full(int feature) const { return full_mask(g_.features[feature].domain.size()); }

  Spec spec(const Category& cat, std::map<std::string, int>& vars, std::vector<Mask>& var_full) {
    int s = symbol(cat.symbol);
    Spec sp;
    for (int f : feats_[s]) {
      const FeatureDecl& decl = g_.features[f];
      const Constraint* c = cat.find(decl.name);
      if (!c) {
        sp.kind.push_back(Spec::None);
        sp.set.push_back(0);
        sp.var.push_back(-1);
      } else if (c->kind == Constraint::Kind::Var) {
        auto [it, inserted] = vars.emplace(c->var, static_cast<int>(var_full.size()));
        if (inserted) var_full.push_back(full(f));
        sp.kind.push_back(Spec::Var);
        sp.set.push_back(0);
        sp.var.push_back(it->second);
      } else {
        Mask m = 0;
        for (const auto& v : c->values) m |= Mask{1} << *decl.index_of(v);
        sp.kind.push_back(Spec::Const);
        sp.set.push_back(m);
        sp.var.push_back(-1);
      }
    }
    return sp;
  }

  const Grammar& g_;
  std::vector<bool> keep_;
  std::map<std::string, int> sym_id_;
  std::vector<std::string> sym_name_;
  std::vector<std::vector<int>> feats_;
  std::map<std::string, int> vocab_;
  std::vector<std::string> words_;
  std::vector<CRule> rules_;
  std::vector<CLex> lex_;
  int start_ = -1;
};

// Union-find over a rule's variables. The canonical key records, per
// variable, the smallest variable index in its class and the class's set.
struct Unifier {
  std::vector<int> parent;
  std::vector<Mask> set;

  explicit Unifier(const std::vector<Mask>& var_full) : set(var_full) {
    parent.resize(var_full.size());
    for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<int>(v);
  }

  static Unifier from_key(const std::vector<Mask>& key) {
    Unifier u(std::vector<Mask>{});
    std::size_t n = key.size() / 2;
    u.parent.resize(n);
    u.set.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      u.parent[v] = static_cast<int>(key[2 * v]);
      u.set[key[2 * v]] = key[2 * v + 1];
    }
    return u;
  }

  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }

  std::vector<Mask> key() {
    std::size_t n = parent.size();
    std::vector<int> min_of(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
      int r = find(static_cast<int>(v));
      if (min_of[r] < 0) min_of[r] = static_cast<int>(v);
    }
    std::vector<Mask> k(2 * n);
    for (std::size_t v = 0; v < n; ++v) {
      int r = find(static_cast<int>(v));
      k[2 * v] = static_cast<Mask>(min_of[r]);
      k[2 * v + 1] = set[r];
    }
    return k;
  }

  bool apply(const Spec& spec, const Fs& fs) {
    for (std::size_t c = 0; c < fs.sets.size(); ++c) {
      Mask m = fs.sets[c];
      int root = -1;
      for (std::size_t k = 0; k < fs.cls.size(); ++k) {
        if (fs.cls[k] != c) continue;
        if (spec.kind[k] == Spec::Const) {
          m &= spec.set[k];
        } else if (spec.kind[k] == Spec::Var) {
          int r = find(spec.var[k]);
          if (root < 0) {
            root = r;
          } else if (r != root) {
            m &= set[r];
            parent[r] = root;
          }
        }
      }
      if (root >= 0) {
        m &= set[root];
        set[root] = m;
      }
      if (!m) return false;
    }
    return true;
  }

  Fs mother(const Spec& spec, const Model& model, int sym) {
    Fs out;
    std::map<int, std::uint8_t> root_cls;
    for (std::size_t k = 0; k < spec.kind.size(); ++k) {
      auto fresh = [&](Mask m) {
        out.cls.push_back(static_cast<std::uint8_t>(out.sets.size()));
        out.sets.push_back(m);
      };
      if (spec.kind[k] == Spec::Var) {
        int r = find(spec.var[k]);
        auto it = root_cls.find(r);
        if (it != root_cls.end()) {
          out.cls.push_back(it->second);
        } else {
          root_cls[r] = static_cast<std::uint8_t>(out.sets.size());
          fresh(set[r]);
        }
      } else if (spec.kind[k] == Spec::Const) {
        fresh(spec.set[k]);
      } else {
        fresh(model.full(model.s_feat(sym, k)));
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Chart parser

struct CBack {
  int lex = -1;
  int rule = -1;
  int active = -1;
  int child = -1;
};

struct CItem {
  int sym;
  Fs fs;
  std::uint64_t count = 0;
  std::vector<CBack> backs;
};

struct AItem {
  int rule;
  int dot;
  std::uint64_t count = 0;
  std::vector<std::pair<int, int>> backs;  // (previous active or -1, child)
};

class ChartParser {
 public:
  ChartParser(const Model& m, const std::vector<int>& toks, std::uint64_t cap)
      : m_(m), toks_(toks), n_(toks.size()), cap_(cap) {
    cspan_.resize((n_ + 1) * (n_ + 1));
    aspan_.resize((n_ + 1) * (n_ + 1));
    cindex_.resize(cspan_.size());
    aindex_.resize(aspan_.size());
  }

  void run() {
    for (std::size_t len = 1; len <= n_; ++len)
      for (std::size_t i = 0; i + len <= n_; ++i) fill(i, i + len);
  }

  std::vector<int> roots() const {
    std::vector<int> out;
    for (int id : cspan_[span(0, n_)])
      if (citems_[id].sym == m_.start_) out.push_back(id);
    return out;
  }

  std::uint64_t count(int id) const { return citems_[id].count; }

  std::vector<std::string> trees(int id, std::size_t limit, int depth = 0) const {
    std::vector<std::string> out;
    if (depth > 64) return out;
    const CItem& it = citems_[id];
    const std::string& name = m_.sym_name_[it.sym];
    for (const CBack& b : it.backs) {
      if (out.size() >= limit) break;
      if (b.lex >= 0) {
        std::string s = "(" + name;
        for (int t : m_.lex_[b.lex].toks) s += " " + m_.words_[t];
        out.push_back(s + ")");
        continue;
      }
      std::vector<std::string> prefixes{""};
      if (b.active >= 0) prefixes = active_trees(b.active, limit, depth + 1);
      auto last = trees(b.child, limit, depth + 1);
      for (const auto& p : prefixes)
        for (const auto& l : last) {
          if (out.size() >= limit) break;
          out.push_back("(" + name + " " + (p.empty() ? "" : p + " ") + l + ")");
        }
    }
    return out;
  }

 private:
  std::size_t span(std::size_t i, std::size_t j) const { return i * (n_ + 1) + j; }

  std::vector<std::string> active_trees(int id, std::size_t limit, int depth) const {
    std::vector<std::string> out;
    for (auto [prev, child] : aitems_[id].backs) {
      std::vector<std::string> prefixes{""};
      if (prev >= 0) prefixes = active_trees(prev, limit, depth + 1);
      auto last = trees(child, limit, depth + 1);
      for (const auto& p : prefixes)
        for (const auto& l : last) {
          if (out.size() >= limit) return out;
          out.push_back(p.empty() ? l : p + " " + l);
        }
    }
    return out;
  }

  int add_complete(std::size_t sp, int sym, Fs fs) {
    auto key = std::make_pair(sym, std::move(fs));
    auto it = cindex_[sp].find(key);
    if (it != cindex_[sp].end()) return it->second;
    int id = static_cast<int>(citems_.size());
    citems_.push_back(CItem{sym, key.second, 0, {}});
    cindex_[sp].emplace(std::move(key), id);
    cspan_[sp].push_back(id);
    return id;
  }

  int add_active(std::size_t sp, int rule, int dot, std::vector<Mask> key) {
    auto k = std::make_tuple(rule, dot, std::move(key));
    auto it = aindex_[sp].find(k);
    if (it != aindex_[sp].end()) return it->second;
    int id = static_cast<int>(aitems_.size());
    aitems_.push_back(AItem{rule, dot, 0, {}});
    aindex_[sp].emplace(std::move(k), id);
    aspan_[sp].push_back(id);
    return id;
  }

  void fill(std::size_t i, std::size_t j) {
    const std::size_t sp = span(i, j);
    std::map<int, std::uint64_t> base;

    for (std::size_t e = 0; e < m_.lex_.size(); ++e) {
      const CLex& lx = m_.lex_[e];
      if (lx.toks.size() != j - i) continue;
      if (!std::equal(lx.toks.begin(), lx.toks.end(), toks_.begin() + static_cast<long>(i)))
        continue;
      int id = add_complete(sp, lx.sym, lx.fs);
      base[id] = sat_add(base[id], 1, cap_);
      citems_[id].backs.push_back(CBack{static_cast<int>(e), -1, -1, -1});
    }

    for (std::size_t k = i + 1; k < j; ++k) {
      for (int a : aspan_[span(i, k)]) {
        const CRule& r = m_.rules_[aitems_[a].rule];
        if (static_cast<std::size_t>(aitems_[a].dot) + 1 != r.dsym.size()) continue;
        const std::vector<Mask> akey = active_key_[a];
        for (int c : cspan_[span(k, j)]) {
          if (citems_[c].sym != r.dsym.back()) continue;
          Unifier u = Unifier::from_key(akey);
          if (!u.apply(r.dspec.back(), citems_[c].fs)) continue;
          int id = add_complete(sp, r.mother, u.mother(r.mspec, m_, r.mother));
          base[id] = sat_add(base[id], sat_mul(aitems_[a].count, citems_[c].count, cap_), cap_);
          citems_[id].backs.push_back(CBack{-1, static_cast<int>(r.index), a, c});
        }
      }
    }

    // Unary closure within the span.
    struct Edge {
      int from, to, rule;
    };
    std::vector<Edge> edges;
    for (std::size_t q = 0; q < cspan_[sp].size(); ++q) {
      int from = cspan_[sp][q];
      for (const CRule& r : m_.rules_) {
        if (r.dsym.size() != 1 || r.dsym[0] != citems_[from].sym) continue;
        Unifier u(r.var_full);
        if (!u.apply(r.dspec[0], citems_[from].fs)) continue;
        int to = add_complete(sp, r.mother, u.mother(r.mspec, m_, r.mother));
        edges.push_back(Edge{from, to, static_cast<int>(r.index)});
        citems_[to].backs.push_back(CBack{-1, static_cast<int>(r.index), -1, from});
      }
    }
    const auto& ids = cspan_[sp];
    std::map<int, std::uint64_t> cnt;
    for (int id : ids) cnt[id] = base.count(id) ? base[id] : 0;
    bool changed = true;
    std::set<int> last_changed;
    for (std::size_t round = 0; changed && round <= ids.size() + 1; ++round) {
      changed = false;
      last_changed.clear();
      std::map<int, std::uint64_t> next;
      for (int id : ids) next[id] = base.count(id) ? base[id] : 0;
      for (const Edge& e : edges) next[e.to] = sat_add(next[e.to], cnt[e.from], cap_);
      for (int id : ids)
        if (next[id] != cnt[id]) {
          changed = true;
          last_changed.insert(id);
        }
      cnt = std::move(next);
    }
    if (changed) {
      // Unary cycle: derivation counts are unbounded.
      std::vector<int> work(last_changed.begin(), last_changed.end());
      std::set<int> seen(work.begin(), work.end());
      while (!work.empty()) {
        int x = work.back();
        work.pop_back();
        cnt[x] = cap_;
        for (const Edge& e : edges)
          if (e.from == x && seen.insert(e.to).second) work.push_back(e.to);
      }
    }
    for (int id : ids) citems_[id].count = cnt[id];

    // Active items starting at i and ending at j.
    for (std::size_t ri = 0; ri < m_.rules_.size(); ++ri) {
      const CRule& r = m_.rules_[ri];
      if (r.dsym.size() < 2) continue;
      for (int c : cspan_[sp]) {
        if (citems_[c].sym != r.dsym[0]) continue;
        Unifier u(r.var_full);
        if (!u.apply(r.dspec[0], citems_[c].fs)) continue;
        record_active(sp, static_cast<int>(ri), 1, u.key(), -1, c, citems_[c].count);
      }
      for (std::size_t dot = 2; dot < r.dsym.size(); ++dot) {
        for (std::size_t k = i + 1; k < j; ++k) {
          for (int a : aspan_[span(i, k)]) {
            if (aitems_[a].rule != static_cast<int>(ri) ||
                aitems_[a].dot != static_cast<int>(dot) - 1)
              continue;
            for (int c : cspan_[span(k, j)]) {
              if (citems_[c].sym != r.dsym[dot - 1]) continue;
              Unifier u = Unifier::from_key(active_key_[a]);
              if (!u.apply(r.dspec[dot - 1], citems_[c].fs)) continue;
              record_active(sp, static_cast<int>(ri), static_cast<int>(dot), u.key(), a, c,
                            sat_mul(aitems_[a].count, citems_[c].count, cap_));
            }
          }
        }
      }
    }
  }

  void record_active(std::size_t sp, int rule, int dot, std::vector<Mask> key, int prev,
                     int child, std::uint64_t count) {
    std::size_t before = aitems_.size();
    int id = add_active(sp, rule, dot, key);
    if (aitems_.size() > before) active_key_.push_back(std::move(key));
    aitems_[id].count = sat_add(aitems_[id].count, count, cap_);
    aitems_[id].backs.emplace_back(prev, child);
  }

  const Model& m_;
  const std::vector<int>& toks_;
  std::size_t n_;
  std::uint64_t cap_;
  std::vector<CItem> citems_;
  std::vector<AItem> aitems_;
  std::vector<std::vector<Mask>> active_key_;
  std::vector<std::vector<int>> cspan_, aspan_;
  std::vector<std::map<std::pair<int, Fs>, int>> cindex_;
  std::vector<std::map<std::tuple<int, int, std::vector<Mask>>, int>> aindex_;
};

// ---------------------------------------------------------------------------
// Bounded enumeration, layered by exact string length.

using Str = std::vector<int>;

class Enumerator {
 public:
  Enumerator(const Model& m, std::size_t max_len, std::size_t cap)
      : m_(m), max_len_(max_len), cap_(cap) {
    compute_min_yield();
    compute_budgets();
    by_sym_.resize(m_.sym_name_.size());
    layers_.resize(max_len + 1);
  }

  StringSet run() {
    for (std::size_t len = 1; len <= max_len_; ++len) fill(len);
    StringSet out;
    for (std::size_t len = 1; len <= max_len_; ++len)
      for (const auto& [key, strs] : layers_[len]) {
        if (keys_[key].first != m_.start_) continue;
        for (const Str& s : strs) {
          std::string text;
          for (int t : s) {
            if (!text.empty()) text += ' ';
            text += m_.words_[t];
          }
          out.push_back(std::move(text));
        }
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  void compute_min_yield() {
    const std::size_t inf = static_cast<std::size_t>(-1);
    min_.assign(m_.sym_name_.size(), inf);
    for (const CLex& l : m_.lex_) min_[l.sym] = std::min(min_[l.sym], l.toks.size());
    bool changed = true;
    while (changed) {
      changed = false;
      for (const CRule& r : m_.rules_) {
        std::size_t total = 0;
        for (int d : r.dsym) {
          if (min_[d] == inf) {
            total = inf;
            break;
          }
          total += min_[d];
        }
        if (total < min_[r.mother]) {
          min_[r.mother] = total;
          changed = true;
        }
      }
    }
  }

  // budget_[s]: longest string of s that can still fit in a start-symbol string.
  void compute_budgets() {
    const std::size_t inf = static_cast<std::size_t>(-1);
    budget_.assign(m_.sym_name_.size(), 0);
    std::vector<bool> reached(m_.sym_name_.size(), false);
    budget_[m_.start_] = max_len_;
    reached[m_.start_] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const CRule& r : m_.rules_) {
        if (!reached[r.mother]) continue;
        std::size_t total = 0;
        for (int d : r.dsym) total = (min_[d] == inf || total == inf) ? inf : total + min_[d];
        if (total == inf) continue;
        for (int d : r.dsym) {
          std::size_t others = total - min_[d];
          if (others > budget_[r.mother]) continue;
          std::size_t b = budget_[r.mother] - others;
          if (!reached[d] || b > budget_[d]) {
            reached[d] = true;
            budget_[d] = b;
            changed = true;
          }
        }
      }
    }
  }

  int key_id(int sym, const Fs& fs) {
    auto k = std::make_pair(sym, fs);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(keys_.size());
    keys_.push_back(k);
    index_.emplace(std::move(k), id);
    by_sym_[sym].push_back(id);
    return id;
  }

  bool insert(std::size_t len, int key, Str s) {
    if (len > budget_[keys_[key].first]) return false;
    bool added = layers_[len][key].insert(std::move(s)).second;
    if (added && ++stored_ > cap_) throw ResourceLimitError("enumerated strings", cap_);
    return added;
  }

  void fill(std::size_t len) {
    std::vector<std::pair<int, Str>> fresh;
    for (const CLex& l : m_.lex_) {
      if (l.toks.size() != len) continue;
      int k = key_id(l.sym, l.fs);
      if (insert(len, k, l.toks)) fresh.emplace_back(k, l.toks);
    }
    for (const CRule& r : m_.rules_) {
      if (r.dsym.size() < 2) continue;
      std::vector<std::pair<int, std::size_t>> chosen;
      Unifier u(r.var_full);
      combine(r, 0, len, u, chosen, len, fresh);
    }
    // Unary closure over newly found strings of this length.
    while (!fresh.empty()) {
      auto [key, s] = std::move(fresh.back());
      fresh.pop_back();
      int sym = keys_[key].first;
      for (const CRule& r : m_.rules_) {
        if (r.dsym.size() != 1 || r.dsym[0] != sym) continue;
        Unifier u(r.var_full);
        if (!u.apply(r.dspec[0], keys_[key].second)) continue;
        int mk = key_id(r.mother, u.mother(r.mspec, m_, r.mother));
        if (insert(len, mk, s)) fresh.emplace_back(mk, s);
      }
    }
  }

  void combine(const CRule& r, std::size_t d, std::size_t remaining, Unifier& u,
               std::vector<std::pair<int, std::size_t>>& chosen, std::size_t len,
               std::vector<std::pair<int, Str>>& fresh) {
    std::size_t n = r.dsym.size();
    if (d == n) {
      if (remaining != 0) return;
      int mk = key_id(r.mother, u.mother(r.mspec, m_, r.mother));
      std::vector<Str> acc{Str{}};
      for (auto [key, l] : chosen) {
        std::vector<Str> next;
        for (const Str& p : acc)
          for (const Str& s : layers_[l].at(key)) {
            Str c = p;
            c.insert(c.end(), s.begin(), s.end());
            next.push_back(std::move(c));
          }
        acc = std::move(next);
      }
      for (Str& s : acc)
        if (insert(len, mk, s)) fresh.emplace_back(mk, std::move(s));
      return;
    }
    std::size_t rest_min = 0;
    for (std::size_t e = d + 1; e < n; ++e) rest_min += min_[r.dsym[e]];
    if (rest_min > remaining) return;
    std::size_t lo = d + 1 == n ? remaining : 1;
    std::size_t hi = remaining - rest_min;
    int sym = r.dsym[d];
    for (std::size_t l = lo; l <= hi; ++l) {
      if (l >= len) continue;  // every daughter is strictly shorter than the mother
      // by_sym_ may grow while recursing; iterate over a snapshot.
      std::vector<int> keys = by_sym_[sym];
      for (int key : keys) {
        auto it = layers_[l].find(key);
        if (it == layers_[l].end() || it->second.empty()) continue;
        Unifier next = u;
        if (!next.apply(r.dspec[d], keys_[key].second)) continue;
        chosen.emplace_back(key, l);
        combine(r, d + 1, remaining - l, next, chosen, len, fresh);
        chosen.pop_back();
      }
    }
  }

  const Model& m_;
  std::size_t max_len_;
  std::size_t cap_;
  std::size_t stored_ = 0;
  std::vector<std::size_t> min_;
  std::vector<std::size_t> budget_;
  std::map<std::pair<int, Fs>, int> index_;
  std::vector<std::pair<int, Fs>> keys_;
  std::vector<std::vector<int>> by_sym_;
  std::vector<std::map<int, std::set<Str>>> layers_;
};

}  // namespace

ParseResult oracle_parse(const Grammar& grammar, const Tokens& tokens,
                         const OracleParseOptions& options) {
  Model model(grammar, options.feature_filter);
  std::vector<int> toks;
  for (const auto& t : tokens) {
    auto id = model.find_word(t);
    if (!id) throw UnknownTokenError(t);
    toks.push_back(*id);
  }
  ParseResult result;
  if (toks.empty()) return result;
  ChartParser parser(model, toks, options.derivation_cap);
  parser.run();
  for (int root : parser.roots()) {
    result.derivation_count =
        sat_add(result.derivation_count, parser.count(root), options.derivation_cap);
    if (options.max_trees > result.derivations.size()) {
      auto t = parser.trees(root, options.max_trees - result.derivations.size());
      result.derivations.insert(result.derivations.end(), t.begin(), t.end());
    }
  }
  result.accepted = result.derivation_count > 0;
  return result;
}

StringSet oracle_enumerate(const Grammar& grammar, std::size_t max_len,
                           const OracleEnumerateOptions& options) {
  Model model(grammar, options.feature_filter);
  if (max_len == 0) return {};
  Enumerator en(model, max_len, options.string_cap);
  return en.run();
}

}  // namespace ugc
