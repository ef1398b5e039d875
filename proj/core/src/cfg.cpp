#include "ugc/cfg.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace ugc {

Expr Expr::terminal(std::string token) { return Expr{Kind::Terminal, std::move(token), {}}; }
Expr Expr::ref(std::string name) { return Expr{Kind::Ref, std::move(name), {}}; }
Expr Expr::seq(std::vector<Expr> items) { return Expr{Kind::Seq, {}, std::move(items)}; }
Expr Expr::alt(std::vector<Expr> items) { return Expr{Kind::Alt, {}, std::move(items)}; }
Expr Expr::star(Expr body) { return Expr{Kind::Star, {}, {std::move(body)}}; }

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_into(std::string& out, const Expr& e, bool top) {
  switch (e.kind) {
    case Expr::Kind::Terminal:
      out += '"' + e.text + '"';
      break;
    case Expr::Kind::Ref:
      out += e.text;
      break;
    case Expr::Kind::Seq:
      if (!top) out += "( ";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ' ';
        print_into(out, e.children[i], false);
      }
      if (!top) out += " )";
      break;
    case Expr::Kind::Alt:
      out += "( ";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += " | ";
        print_into(out, e.children[i], true);
      }
      out += " )";
      break;
    case Expr::Kind::Star: {
      print_into(out, e.children.front(), false);
      out += '*';
      break;
    }
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(out, e, true);
  return out;
}

std::string print_cfg(const ContextFreeGrammar& cfg) {
  std::string out;
  auto line = [&](const std::string& name, const Production& p) {
    out += name + " ->";
    for (std::size_t i = 0; i < p.alternatives.size(); ++i) {
      out += i ? " | " : " ";
      print_into(out, p.alternatives[i], true);
    }
    out += " ;\n";
  };
  auto it = cfg.productions.find(cfg.start);
  if (it != cfg.productions.end()) line(it->first, it->second);
  for (const auto& [name, p] : cfg.productions)
    if (name != cfg.start) line(name, p);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct CfgToken {
  enum Kind { Name, String, Arrow, Bar, Semi, LParen, RParen, Star, End } kind = End;
  std::string text;
  std::size_t line = 0, column = 0;
};

bool name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '+' || ch == '-';
}

std::vector<CfgToken> lex_cfg(std::string_view text) {
  std::vector<CfgToken> out;
  std::size_t line = 1, col = 1, i = 0;
  auto error = [&](const std::string& msg) {
    throw GrammarError({Diagnostic{line, col, "syntax-error", "", msg}});
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      ++col;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    CfgToken t;
    t.line = line;
    t.column = col;
    if (ch == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.kind = CfgToken::Arrow;
      i += 2;
      col += 2;
    } else if (ch == '"') {
      std::size_t e = text.find('"', i + 1);
      if (e == std::string_view::npos || text.substr(i, e - i).find('\n') != std::string_view::npos)
        error("unterminated string");
      t.kind = CfgToken::String;
      t.text = std::string(text.substr(i + 1, e - i - 1));
      col += e + 1 - i;
      i = e + 1;
    } else if (name_char(ch)) {
      std::size_t b = i;
      while (i < text.size() && name_char(text[i]) &&
             !(text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>'))
        ++i;
      t.kind = CfgToken::Name;
      t.text = std::string(text.substr(b, i - b));
      col += i - b;
    } else {
      switch (ch) {
        case '|': t.kind = CfgToken::Bar; break;
        case ';': t.kind = CfgToken::Semi; break;
        case '(': t.kind = CfgToken::LParen; break;
        case ')': t.kind = CfgToken::RParen; break;
        case '*': t.kind = CfgToken::Star; break;
        default: error(std::string("unexpected character '") + ch + "'");
      }
      ++i;
      ++col;
    }
    out.push_back(std::move(t));
  }
  CfgToken end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class CfgParser {
 public:
  explicit CfgParser(std::vector<CfgToken> toks) : toks_(std::move(toks)) {}

  ContextFreeGrammar run() {
    ContextFreeGrammar cfg;
    while (peek().kind != CfgToken::End) {
      if (peek().kind != CfgToken::Name) fail("expected nonterminal name");
      std::string name = toks_[pos_++].text;
      expect(CfgToken::Arrow, "expected '->'");
      if (cfg.start.empty()) cfg.start = name;
      Production& p = cfg.productions[name];
      if (!p.alternatives.empty()) fail("nonterminal '" + name + "' defined twice");
      for (auto& a : alternatives()) p.add(std::move(a), Origin::Text);
      expect(CfgToken::Semi, "expected ';'");
    }
    return cfg;
  }

 private:
  const CfgToken& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw GrammarError({Diagnostic{peek().line, peek().column, "syntax-error", "", msg}});
  }

  void expect(CfgToken::Kind k, const char* msg) {
    if (peek().kind != k) fail(msg);
    ++pos_;
  }

  std::vector<Expr> alternatives() {
    std::vector<Expr> alts;
    alts.push_back(sequence());
    while (peek().kind == CfgToken::Bar) {
      ++pos_;
      alts.push_back(sequence());
    }
    return alts;
  }

  Expr sequence() {
    std::vector<Expr> items;
    while (true) {
      auto k = peek().kind;
      if (k != CfgToken::Name && k != CfgToken::String && k != CfgToken::LParen) break;
      Expr e = primary();
      while (peek().kind == CfgToken::Star) {
        ++pos_;
        e = Expr::star(std::move(e));
      }
      items.push_back(std::move(e));
    }
    if (items.empty()) fail("empty alternative");
    if (items.size() == 1) return std::move(items.front());
    return Expr::seq(std::move(items));
  }

  Expr primary() {
    const CfgToken& t = toks_[pos_++];
    if (t.kind == CfgToken::Name) return Expr::ref(t.text);
    if (t.kind == CfgToken::String) return Expr::terminal(t.text);
    auto alts = alternatives();
    expect(CfgToken::RParen, "expected ')'");
    if (alts.size() == 1) return std::move(alts.front());
    return Expr::alt(std::move(alts));
  }

  std::vector<CfgToken> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ContextFreeGrammar parse_cfg(std::string_view text) {
  ContextFreeGrammar cfg = CfgParser(lex_cfg(text)).run();
  if (cfg.start.empty())
    throw GrammarError({Diagnostic{0, 0, "empty-grammar", "", "no productions"}});
  auto diags = validate_cfg(cfg);
  if (!diags.empty()) throw GrammarError(std::move(diags));
  return cfg;
}

ContextFreeGrammar load_cfg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError({Diagnostic{0, 0, "io-error", path, "cannot read grammar file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cfg(ss.str());
}

// ---------------------------------------------------------------------------
// Analysis

namespace {

void collect_refs(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Ref) out.insert(e.text);
  for (const auto& c : e.children) collect_refs(c, out);
}

bool expr_nullable(const Expr& e, const std::map<std::string, bool>& nt) {
  switch (e.kind) {
    case Expr::Kind::Terminal:
      return false;
    case Expr::Kind::Ref: {
      auto it = nt.find(e.text);
      return it != nt.end() && it->second;
    }
    case Expr::Kind::Seq:
      for (const auto& c : e.children)
        if (!expr_nullable(c, nt)) return false;
      return true;
    case Expr::Kind::Alt:
      for (const auto& c : e.children)
        if (expr_nullable(c, nt)) return true;
      return false;
    case Expr::Kind::Star:
      return true;
  }
  return false;
}

void expr_first(const Expr& e, const std::map<std::string, bool>& nt, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Terminal:
      return;
    case Expr::Kind::Ref:
      out.insert(e.text);
      return;
    case Expr::Kind::Seq:
      for (const auto& c : e.children) {
        expr_first(c, nt, out);
        if (!expr_nullable(c, nt)) return;
      }
      return;
    case Expr::Kind::Alt:
      for (const auto& c : e.children) expr_first(c, nt, out);
      return;
    case Expr::Kind::Star:
      expr_first(e.children.front(), nt, out);
      return;
  }
}

}  // namespace

std::vector<Diagnostic> validate_cfg(const ContextFreeGrammar& cfg) {
  std::vector<Diagnostic> out;
  if (!cfg.productions.count(cfg.start))
    out.push_back(Diagnostic{0, 0, "undefined-start", cfg.start, "start has no production"});
  for (const auto& [name, p] : cfg.productions) {
    if (p.alternatives.empty())
      out.push_back(Diagnostic{0, 0, "empty-production", name, "no alternatives"});
    std::set<std::string> refs;
    for (const auto& a : p.alternatives) collect_refs(a, refs);
    for (const auto& r : refs)
      if (!cfg.productions.count(r))
        out.push_back(Diagnostic{0, 0, "unresolved-reference", name,
                                 "reference to undefined nonterminal '" + r + "'"});
  }
  return out;
}

std::map<std::string, bool> nullable_nonterminals(const ContextFreeGrammar& cfg) {
  std::map<std::string, bool> nt;
  for (const auto& [name, _] : cfg.productions) nt[name] = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, p] : cfg.productions) {
      if (nt[name]) continue;
      for (const auto& a : p.alternatives)
        if (expr_nullable(a, nt)) {
          nt[name] = true;
          changed = true;
          break;
        }
    }
  }
  return nt;
}

std::map<std::string, std::vector<std::string>> leftmost_graph(const ContextFreeGrammar& cfg) {
  auto nt = nullable_nonterminals(cfg);
  std::map<std::string, std::vector<std::string>> graph;
  for (const auto& [name, p] : cfg.productions) {
    std::set<std::string> first;
    for (const auto& a : p.alternatives) expr_first(a, nt, first);
    graph[name].assign(first.begin(), first.end());
  }
  return graph;
}

bool has_left_recursion(const ContextFreeGrammar& cfg) {
  auto graph = leftmost_graph(cfg);
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
    color[v] = 1;
    for (const auto& w : graph[v]) {
      if (color[w] == 1) return true;
      if (color[w] == 0 && dfs(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (const auto& [v, _] : graph)
    if (color[v] == 0 && dfs(v)) return true;
  return false;
}

}  // namespace ugc
