// Ordering-based left-recursion removal, applied only to the strongly
// connected components of the leftmost graph that actually contain a cycle.
#include <algorithm>
#include <functional>
#include <set>

#include "ugc/cfg.hpp"

namespace ugc {
namespace {

struct Sym {
  bool terminal;
  std::string text;
  auto operator<=>(const Sym&) const = default;
};

using Alt = std::vector<Sym>;

std::vector<std::vector<std::string>> cyclic_components(
    const std::map<std::string, std::vector<std::string>>& graph) {
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string&)> strong = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : graph.at(v)) {
      if (!index.count(w)) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<std::string> comp;
    std::string w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      comp.push_back(w);
    } while (w != v);
    const auto& succ = graph.at(v);
    bool self = std::find(succ.begin(), succ.end(), v) != succ.end();
    if (comp.size() > 1 || self) {
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (const auto& [v, _] : graph)
    if (!index.count(v)) strong(v);
  std::sort(out.begin(), out.end());
  return out;
}

class Rewriter {
 public:
  explicit Rewriter(ContextFreeGrammar& cfg) : cfg_(cfg) {
    for (const auto& [name, _] : cfg.productions) taken_.insert(name);
  }

  void rewrite(const std::vector<std::string>& members) {
    std::vector<std::string> order = members;
    for (const auto& m : members) {
      std::vector<Alt> alts;
      for (const auto& a : cfg_.productions.at(m).alternatives) {
        for (auto& x : expand(a, m, order)) alts.push_back(std::move(x));
      }
      bnf_[m] = clean(std::move(alts));
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::string& ai = order[i];
      for (std::size_t j = 0; j < i; ++j) {
        const std::string& aj = order[j];
        std::vector<Alt> next;
        for (auto& alt : bnf_[ai]) {
          if (!alt.front().terminal && alt.front().text == aj) {
            for (const auto& beta : bnf_[aj]) {
              Alt x = beta;
              x.insert(x.end(), alt.begin() + 1, alt.end());
              next.push_back(std::move(x));
            }
          } else {
            next.push_back(std::move(alt));
          }
        }
        bnf_[ai] = clean(std::move(next));
      }
      remove_direct(ai);
    }

    for (const auto& [name, alts] : bnf_) {
      Production p;
      for (const auto& alt : alts) p.add(to_expr(alt), Origin::Rewrite);
      cfg_.productions[name] = std::move(p);
    }
    bnf_.clear();
  }

 private:
  std::string fresh(const std::string& base, const char* suffix) {
    std::string name = base + suffix;
    for (int k = 2; taken_.count(name); ++k) name = base + suffix + std::to_string(k);
    taken_.insert(name);
    return name;
  }

  static std::vector<Alt> clean(std::vector<Alt> alts) {
    std::vector<Alt> out;
    std::set<Alt> seen;
    for (auto& a : alts)
      if (!a.empty() && seen.insert(a).second) out.push_back(std::move(a));
    return out;
  }

  std::vector<Alt> expand(const Expr& e, const std::string& owner,
                          std::vector<std::string>& order) {
    switch (e.kind) {
      case Expr::Kind::Terminal:
        return {Alt{Sym{true, e.text}}};
      case Expr::Kind::Ref:
        return {Alt{Sym{false, e.text}}};
      case Expr::Kind::Seq: {
        std::vector<Alt> acc{Alt{}};
        for (const auto& c : e.children) {
          auto part = expand(c, owner, order);
          std::vector<Alt> next;
          for (const auto& p : acc)
            for (const auto& q : part) {
              Alt x = p;
              x.insert(x.end(), q.begin(), q.end());
              next.push_back(std::move(x));
            }
          acc = std::move(next);
        }
        return acc;
      }
      case Expr::Kind::Alt: {
        std::vector<Alt> out;
        for (const auto& c : e.children)
          for (auto& x : expand(c, owner, order)) out.push_back(std::move(x));
        return out;
      }
      case Expr::Kind::Star: {
        // (b)* becomes "nothing | T" with T -> b T | b.
        std::string t = fresh(owner, "__star");
        order.push_back(t);
        std::vector<Alt> body = expand(e.children.front(), owner, order);
        std::vector<Alt> talts;
        for (const auto& b : body) {
          if (b.empty()) continue;
          Alt rec = b;
          rec.push_back(Sym{false, t});
          talts.push_back(std::move(rec));
          talts.push_back(b);
        }
        bnf_[t] = clean(std::move(talts));
        return {Alt{}, Alt{Sym{false, t}}};
      }
    }
    return {};
  }

  void remove_direct(const std::string& a) {
    std::vector<Alt> alphas, betas;
    for (auto& alt : bnf_[a]) {
      if (!alt.front().terminal && alt.front().text == a) {
        if (alt.size() > 1) alphas.emplace_back(alt.begin() + 1, alt.end());
      } else {
        betas.push_back(std::move(alt));
      }
    }
    if (alphas.empty()) {
      bnf_[a] = std::move(betas);
      return;
    }
    if (betas.empty())
      throw Error("nonterminal '" + a + "' is left-recursive with no terminating alternative");
    std::string tail = fresh(a, "__lr");
    std::vector<Alt> head, rest;
    for (const auto& b : betas) {
      Alt x = b;
      x.push_back(Sym{false, tail});
      head.push_back(std::move(x));
      head.push_back(b);
    }
    for (const auto& al : alphas) {
      Alt x = al;
      x.push_back(Sym{false, tail});
      rest.push_back(std::move(x));
      rest.push_back(al);
    }
    bnf_[a] = clean(std::move(head));
    bnf_[tail] = clean(std::move(rest));
  }

  static Expr to_expr(const Alt& alt) {
    std::vector<Expr> items;
    for (const auto& s : alt) items.push_back(s.terminal ? Expr::terminal(s.text) : Expr::ref(s.text));
    if (items.size() == 1) return std::move(items.front());
    return Expr::seq(std::move(items));
  }

  ContextFreeGrammar& cfg_;
  std::set<std::string> taken_;
  std::map<std::string, std::vector<Alt>> bnf_;
};

}  // namespace

ContextFreeGrammar eliminate_left_recursion(const ContextFreeGrammar& cfg) {
  auto comps = cyclic_components(leftmost_graph(cfg));
  if (comps.empty()) return cfg;
  ContextFreeGrammar out = cfg;
  Rewriter rw(out);
  for (const auto& comp : comps) rw.rewrite(comp);
  return out;
}

}  // namespace ugc
