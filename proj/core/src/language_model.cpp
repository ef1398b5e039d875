#include "ugc/language_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace ugc {
namespace {

constexpr std::uint64_t kCountCap = std::uint64_t{1} << 63;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return std::min(kCountCap, a + b); }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kCountCap / b) return kCountCap;
  return std::min(kCountCap, a * b);
}

std::string concat(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + ' ' + b;
}

struct Arc {
  std::size_t to;
  int graph;  // -1 for terminals
  std::string label;
  double prob;
};

struct Network {
  std::vector<std::string> names;
  std::vector<std::size_t> nodes, starts, ends;
  std::vector<std::vector<std::vector<Arc>>> arcs;  // graph -> node -> arcs
  std::size_t top = 0;

  explicit Network(const PfsgSet& set) {
    std::map<std::string, std::size_t> index;
    for (const auto& [name, _] : set.graphs) {
      index[name] = names.size();
      names.push_back(name);
    }
    if (!index.count(set.top)) throw CompileError("top graph '" + set.top + "' is missing");
    top = index[set.top];
    for (const auto& [name, g] : set.graphs) {
      nodes.push_back(g.nodes);
      starts.push_back(g.start);
      ends.push_back(g.end);
      std::vector<std::vector<Arc>> a(g.nodes);
      for (const auto& t : g.transitions) {
        int ref = -1;
        if (t.ref) {
          auto it = index.find(t.label);
          if (it == index.end()) throw CompileError("unresolved graph reference '" + t.label + "'");
          ref = static_cast<int>(it->second);
        }
        a[t.from].push_back(Arc{t.to, ref, t.label, t.prob});
      }
      arcs.push_back(std::move(a));
    }
  }
};

class InsideChart {
 public:
  InsideChart(const Network& net, const Tokens& toks)
      : net_(net), toks_(toks), n_(toks.size()), g_(net.names.size()),
        prob_(g_ * (n_ + 1) * (n_ + 1), 0.0), count_(prob_.size(), 0) {}

  CfgParseResult run() {
    for (std::size_t len = 1; len <= n_; ++len)
      for (std::size_t i = 0; i + len <= n_; ++i) span(i, i + len);
    CfgParseResult r;
    if (n_ == 0) {
      r.log_prob = -std::numeric_limits<double>::infinity();
      return r;
    }
    r.prob = prob_[at(net_.top, 0, n_)];
    r.derivation_count = count_[at(net_.top, 0, n_)];
    r.accepted = r.derivation_count > 0;
    r.log_prob = r.accepted ? std::log(r.prob) : -std::numeric_limits<double>::infinity();
    return r;
  }

 private:
  std::size_t at(std::size_t g, std::size_t i, std::size_t j) const {
    return (g * (n_ + 1) + i) * (n_ + 1) + j;
  }

  // Same-span references (unit paths) make the span values depend on each
  // other; iterate until they settle. Counts that keep growing come from a
  // unit cycle and saturate.
  void span(std::size_t i, std::size_t j) {
    const std::size_t acyclic_rounds = g_ + 2;
    for (std::size_t round = 0; round < acyclic_rounds + 2000; ++round) {
      bool prob_changed = false, count_changed = false;
      for (std::size_t g = 0; g < g_; ++g) {
        auto [p, c] = inside(g, i, j);
        std::size_t k = at(g, i, j);
        if (std::abs(p - prob_[k]) > 1e-15 * std::max(1.0, p)) prob_changed = true;
        if (c != count_[k]) {
          count_changed = true;
          count_[k] = round >= acyclic_rounds ? kCountCap : c;
        }
        prob_[k] = p;
      }
      if (!prob_changed && !count_changed) return;
    }
  }

  std::pair<double, std::uint64_t> inside(std::size_t g, std::size_t i, std::size_t j) const {
    const std::size_t w = j - i + 1;
    std::vector<double> p(w * net_.nodes[g], 0.0);
    std::vector<std::uint64_t> c(p.size(), 0);
    auto cell = [&](std::size_t k, std::size_t node) { return (k - i) * net_.nodes[g] + node; };
    p[cell(i, net_.starts[g])] = 1.0;
    c[cell(i, net_.starts[g])] = 1;
    for (std::size_t k = i; k < j; ++k)
      for (std::size_t node = 0; node < net_.nodes[g]; ++node) {
        std::size_t from = cell(k, node);
        if (c[from] == 0) continue;
        for (const Arc& a : net_.arcs[g][node]) {
          if (a.graph < 0) {
            if (toks_[k] != a.label) continue;
            std::size_t to = cell(k + 1, a.to);
            p[to] += p[from] * a.prob;
            c[to] = sat_add(c[to], c[from]);
            continue;
          }
          for (std::size_t e = k + 1; e <= j; ++e) {
            std::size_t sub = at(static_cast<std::size_t>(a.graph), k, e);
            if (count_[sub] == 0) continue;
            std::size_t to = cell(e, a.to);
            p[to] += p[from] * a.prob * prob_[sub];
            c[to] = sat_add(c[to], sat_mul(c[from], count_[sub]));
          }
        }
      }
    std::size_t fin = cell(j, net_.ends[g]);
    return {p[fin], c[fin]};
  }

  const Network& net_;
  const Tokens& toks_;
  std::size_t n_, g_;
  std::vector<double> prob_;
  std::vector<std::uint64_t> count_;
};

// ---------------------------------------------------------------------------

class StringBudget {
 public:
  explicit StringBudget(std::size_t cap) : cap_(cap) {}
  void add(std::size_t n) {
    stored_ += n;
    if (stored_ > cap_) throw ResourceLimitError("enumerated strings", cap_);
  }

 private:
  std::size_t cap_;
  std::size_t stored_ = 0;
};

class CfgEnumerator {
 public:
  CfgEnumerator(const ContextFreeGrammar& cfg, std::size_t max_len, std::size_t cap)
      : cfg_(cfg), max_len_(max_len), budget_(cap) {
    nullable_ = nullable_nonterminals(cfg);
    min_lengths();
    budgets();
    unit_order();
  }

  StringSet run() {
    for (const auto& [name, _] : cfg_.productions) {
      lang_[name].assign(max_len_ + 1, {});
      if (nullable_[name]) lang_[name][0].insert("");
    }
    for (std::size_t n = 1; n <= max_len_; ++n) layer(n);
    StringSet out;
    for (std::size_t n = 1; n <= max_len_; ++n)
      out.insert(out.end(), lang_[cfg_.start][n].begin(), lang_[cfg_.start][n].end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t min_len(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Terminal: return 1;
      case Expr::Kind::Ref: {
        auto it = min_.find(e.text);
        return it == min_.end() ? kInf : it->second;
      }
      case Expr::Kind::Seq: {
        std::size_t s = 0;
        for (const auto& c : e.children) s = std::min(kInf, s + min_len(c));
        return s;
      }
      case Expr::Kind::Alt: {
        std::size_t m = kInf;
        for (const auto& c : e.children) m = std::min(m, min_len(c));
        return m;
      }
      case Expr::Kind::Star: return 0;
    }
    return kInf;
  }

  void min_lengths() {
    for (const auto& [name, _] : cfg_.productions) min_[name] = kInf;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [name, p] : cfg_.productions)
        for (const auto& a : p.alternatives) {
          std::size_t m = min_len(a);
          if (m < min_[name]) {
            min_[name] = m;
            changed = true;
          }
        }
    }
  }

  // budget_of_[x]: longest string of x that can still fit in a top-level string.
  void budget_refs(const Expr& e, std::size_t b, bool& changed) {
    switch (e.kind) {
      case Expr::Kind::Terminal: return;
      case Expr::Kind::Ref: {
        auto it = budget_of_.find(e.text);
        if (it != budget_of_.end() && (it->second == kNone || b > it->second)) {
          it->second = b;
          changed = true;
        }
        return;
      }
      case Expr::Kind::Alt:
      case Expr::Kind::Star:
        for (const auto& c : e.children) budget_refs(c, b, changed);
        return;
      case Expr::Kind::Seq: {
        std::size_t total = 0;
        for (const auto& c : e.children) total = std::min(kInf, total + min_len(c));
        for (const auto& c : e.children) {
          std::size_t others = total - min_len(c);
          if (others <= b) budget_refs(c, b - others, changed);
        }
        return;
      }
    }
  }

  void budgets() {
    for (const auto& [name, _] : cfg_.productions) budget_of_[name] = kNone;
    budget_of_[cfg_.start] = max_len_;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [name, p] : cfg_.productions) {
        std::size_t b = budget_of_[name];
        if (b == kNone) continue;
        for (const auto& a : p.alternatives) budget_refs(a, b, changed);
      }
    }
  }

  bool nullable(const Expr& e) const { return min_len(e) == 0; }

  void unit_refs(const Expr& e, std::set<std::string>& out) const {
    switch (e.kind) {
      case Expr::Kind::Terminal: return;
      case Expr::Kind::Ref: out.insert(e.text); return;
      case Expr::Kind::Alt:
        for (const auto& c : e.children) unit_refs(c, out);
        return;
      case Expr::Kind::Star: unit_refs(e.children.front(), out); return;
      case Expr::Kind::Seq:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          bool rest = true;
          for (std::size_t k = 0; k < e.children.size() && rest; ++k)
            if (k != i && !nullable(e.children[k])) rest = false;
          if (rest) unit_refs(e.children[i], out);
        }
        return;
    }
  }

  // Post-order over unit references so that most nonterminals are computed
  // after the ones they can consume whole.
  void unit_order() {
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& [name, p] : cfg_.productions) {
      for (const auto& a : p.alternatives) unit_refs(a, deps[name]);
      for (const auto& d : deps[name]) dependents_[d].insert(name);
    }
    std::set<std::string> seen;
    std::function<void(const std::string&)> visit = [&](const std::string& x) {
      if (!seen.insert(x).second) return;
      for (const auto& d : deps[x])
        if (cfg_.productions.count(d)) visit(d);
      order_.push_back(x);
    };
    for (const auto& [name, _] : cfg_.productions) visit(name);
  }

  void layer(std::size_t n) {
    std::deque<std::string> work(order_.begin(), order_.end());
    std::set<std::string> queued(order_.begin(), order_.end());
    while (!work.empty()) {
      std::string x = work.front();
      work.pop_front();
      queued.erase(x);
      if (min_[x] > n || budget_of_[x] == kNone || budget_of_[x] < n) continue;
      std::set<std::string> fresh;
      for (const auto& a : cfg_.productions.at(x).alternatives) gen(a, n, fresh);
      auto& cur = lang_[x][n];
      std::size_t before = cur.size();
      cur.merge(fresh);
      if (cur.size() == before) continue;
      budget_.add(cur.size() - before);
      for (const auto& d : dependents_[x])
        if (queued.insert(d).second) work.push_back(d);
    }
  }

  // Adds every string of exactly n tokens derivable from e.
  void gen(const Expr& e, std::size_t n, std::set<std::string>& out) {
    if (min_len(e) > n) return;
    switch (e.kind) {
      case Expr::Kind::Terminal:
        if (n == 1) out.insert(e.text);
        return;
      case Expr::Kind::Ref: {
        const auto& s = lang_[e.text][n];
        out.insert(s.begin(), s.end());
        return;
      }
      case Expr::Kind::Alt:
        for (const auto& c : e.children) gen(c, n, out);
        return;
      case Expr::Kind::Seq:
        seq(e.children, 0, n, "", out);
        return;
      case Expr::Kind::Star: {
        if (n == 0) {
          out.insert("");
          return;
        }
        for (std::size_t m = 1; m <= n; ++m) {
          std::set<std::string> head, tail;
          gen(e.children.front(), m, head);
          if (head.empty()) continue;
          gen(e, n - m, tail);
          for (const auto& h : head)
            for (const auto& t : tail) out.insert(concat(h, t));
        }
        return;
      }
    }
  }

  void seq(const std::vector<Expr>& items, std::size_t i, std::size_t n, const std::string& prefix,
           std::set<std::string>& out) {
    if (i == items.size()) {
      if (n == 0) out.insert(prefix);
      return;
    }
    std::size_t rest = 0;
    for (std::size_t k = i + 1; k < items.size(); ++k) rest = std::min(kInf, rest + min_len(items[k]));
    if (rest > n) return;
    for (std::size_t m = min_len(items[i]); m + rest <= n; ++m) {
      std::set<std::string> part;
      gen(items[i], m, part);
      for (const auto& p : part) seq(items, i + 1, n - m, concat(prefix, p), out);
    }
  }

  const ContextFreeGrammar& cfg_;
  std::size_t max_len_;
  StringBudget budget_;
  std::map<std::string, bool> nullable_;
  std::map<std::string, std::size_t> min_;
  std::map<std::string, std::size_t> budget_of_;
  std::map<std::string, std::set<std::string>> dependents_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::set<std::string>>> lang_;
};

}  // namespace

CfgParseResult cfg_parse(const PfsgSet& set, const Tokens& tokens) {
  Network net(set);
  return InsideChart(net, tokens).run();
}

CfgParseResult cfg_parse(const ContextFreeGrammar& cfg, const Tokens& tokens) {
  return cfg_parse(build_pfsg(cfg), tokens);
}

StringSet cfg_enumerate(const ContextFreeGrammar& cfg, std::size_t max_len, std::size_t string_cap) {
  auto diags = validate_cfg(cfg);
  if (!diags.empty()) throw CompileError(diags.front().str());
  return CfgEnumerator(cfg, max_len, string_cap).run();
}

StringSet pfsg_enumerate(const PfsgSet& set, std::size_t max_len, std::size_t string_cap) {
  Network net(set);
  const std::size_t G = net.names.size();
  // lang[g][m]: strings of length m spelled by graph g.
  std::vector<std::vector<std::set<std::string>>> lang(G, std::vector<std::set<std::string>>(max_len + 1));
  StringBudget budget(string_cap);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t g = 0; g < G; ++g) {
      std::vector<std::vector<std::set<std::string>>> fwd(
          net.nodes[g], std::vector<std::set<std::string>>(max_len + 1));
      fwd[net.starts[g]][0].insert("");
      for (std::size_t m = 0; m < max_len; ++m)
        for (std::size_t node = 0; node < net.nodes[g]; ++node) {
          if (fwd[node][m].empty()) continue;
          for (const Arc& a : net.arcs[g][node]) {
            if (a.graph < 0) {
              for (const auto& s : fwd[node][m]) fwd[a.to][m + 1].insert(concat(s, a.label));
              continue;
            }
            for (std::size_t len = 1; m + len <= max_len; ++len)
              for (const auto& t : lang[static_cast<std::size_t>(a.graph)][len])
                for (const auto& s : fwd[node][m]) fwd[a.to][m + len].insert(concat(s, t));
          }
        }
      for (std::size_t m = 1; m <= max_len; ++m) {
        auto& cur = lang[g][m];
        std::size_t before = cur.size();
        cur.merge(fwd[net.ends[g]][m]);
        if (cur.size() != before) {
          budget.add(cur.size() - before);
          changed = true;
        }
      }
    }
  }
  StringSet out;
  for (std::size_t m = 1; m <= max_len; ++m) out.insert(out.end(), lang[net.top][m].begin(), lang[net.top][m].end());
  std::sort(out.begin(), out.end());
  return out;
}

PerplexityResult perplexity(const PfsgSet& set, const std::vector<std::string>& corpus) {
  Network net(set);
  PerplexityResult r;
  double log2_sum = 0;
  for (const auto& sentence : corpus) {
    Tokens toks = tokenize(sentence);
    auto p = InsideChart(net, toks).run();
    if (!p.accepted || p.prob <= 0) {
      r.rejected.push_back(sentence);
      continue;
    }
    log2_sum += std::log2(p.prob);
    r.words += toks.size();
    ++r.sentences;
  }
  if (r.sentences == 0) throw Error("perplexity undefined: no sentence of the corpus is in the language");
  r.perplexity = std::exp2(-log2_sum / static_cast<double>(r.words));
  return r;
}

PerplexityResult perplexity(const ContextFreeGrammar& cfg, const std::vector<std::string>& corpus) {
  return perplexity(build_pfsg(cfg), corpus);
}

}  // namespace ugc
