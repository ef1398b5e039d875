// Line-oriented reader for the grammar DSL.
#include <algorithm>
#include <cctype>

#include "ugc/grammar.hpp"

namespace ugc {
namespace {

struct Token {
  enum Kind { Ident, String, Punct, Arrow, End } kind = End;
  std::string text;
  std::size_t column = 0;
};

struct SyntaxError {
  std::size_t column;
  std::string message;
};

class LineLexer {
 public:
  explicit LineLexer(std::string_view line) : line_(line) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  void expect_punct(char ch) {
    if (tok_.kind != Token::Punct || tok_.text[0] != ch)
      throw SyntaxError{tok_.column, std::string("expected '") + ch + "'" + found()};
    advance();
  }

  std::string expect_ident(const char* what) {
    if (tok_.kind != Token::Ident) throw SyntaxError{tok_.column, std::string("expected ") + what + found()};
    return take().text;
  }

  bool at_punct(char ch) const { return tok_.kind == Token::Punct && tok_.text[0] == ch; }

  std::string found() const {
    if (tok_.kind == Token::End) return ", found end of line";
    return ", found '" + tok_.text + "'";
  }

 private:
  void advance() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.column = pos_ + 1;
    if (pos_ >= line_.size() || line_[pos_] == '#') {
      tok_.kind = Token::End;
      return;
    }
    char ch = line_[pos_];
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t b = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Ident;
      tok_.text = std::string(line_.substr(b, pos_ - b));
    } else if (ch == '"') {
      std::size_t e = line_.find('"', pos_ + 1);
      if (e == std::string_view::npos) throw SyntaxError{pos_ + 1, "unterminated string"};
      tok_.kind = Token::String;
      tok_.text = std::string(line_.substr(pos_ + 1, e - pos_ - 1));
      pos_ = e + 1;
    } else if (ch == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
      tok_.kind = Token::Arrow;
      tok_.text = "->";
      pos_ += 2;
    } else if (std::string_view(":[]{},=").find(ch) != std::string_view::npos) {
      tok_.kind = Token::Punct;
      tok_.text = std::string(1, ch);
      ++pos_;
    } else {
      throw SyntaxError{pos_ + 1, std::string("unexpected character '") + ch + "'"};
    }
  }

  std::string_view line_;
  std::size_t pos_ = 0;
  Token tok_;
};

Category parse_category(LineLexer& lx) {
  Category cat;
  cat.symbol = lx.expect_ident("category symbol");
  if (!lx.at_punct(':')) return cat;
  lx.take();
  lx.expect_punct('[');
  if (lx.at_punct(']')) {
    lx.take();
    return cat;
  }
  while (true) {
    std::size_t col = lx.peek().column;
    std::string fname = lx.expect_ident("feature name");
    lx.expect_punct('=');
    Constraint c;
    if (lx.at_punct('{')) {
      lx.take();
      std::vector<std::string> vals;
      vals.push_back(lx.expect_ident("value"));
      while (lx.at_punct(',')) {
        lx.take();
        vals.push_back(lx.expect_ident("value"));
      }
      lx.expect_punct('}');
      c = Constraint::subset(std::move(vals));
    } else {
      std::string v = lx.expect_ident("value or variable");
      c = is_variable_name(v) ? Constraint::variable(v) : Constraint::atom(v);
    }
    if (!cat.constraints.emplace(fname, std::move(c)).second)
      throw SyntaxError{col, "feature '" + fname + "' constrained twice"};
    if (lx.at_punct(']')) {
      lx.take();
      break;
    }
    lx.expect_punct(',');
  }
  return cat;
}

void expect_end(LineLexer& lx) {
  if (lx.peek().kind != Token::End)
    throw SyntaxError{lx.peek().column, "unexpected trailing input" + lx.found()};
}

void parse_line(std::string_view line, std::size_t lineno, Grammar& g) {
  LineLexer lx(line);
  if (lx.peek().kind == Token::End) return;
  std::size_t kw_col = lx.peek().column;
  std::string kw = lx.expect_ident("keyword");
  if (kw == "feature") {
    FeatureDecl f;
    f.name = lx.expect_ident("feature name");
    std::size_t kcol = lx.peek().column;
    std::string kind = lx.expect_ident("feature kind");
    if (kind == "syn") f.kind = FeatureKind::Syntactic;
    else if (kind == "sem") f.kind = FeatureKind::Semantic;
    else throw SyntaxError{kcol, "feature kind must be 'syn' or 'sem'"};
    lx.expect_punct('{');
    f.domain.push_back(lx.expect_ident("value"));
    while (lx.at_punct(',')) {
      lx.take();
      f.domain.push_back(lx.expect_ident("value"));
    }
    lx.expect_punct('}');
    expect_end(lx);
    g.features.push_back(std::move(f));
  } else if (kw == "start") {
    g.start = lx.expect_ident("start symbol");
    g.start_line = lineno;
    expect_end(lx);
  } else if (kw == "rule") {
    Rule r;
    r.line = lineno;
    r.id = lx.expect_ident("rule id");
    lx.expect_punct(':');
    r.mother = parse_category(lx);
    if (lx.peek().kind != Token::Arrow) throw SyntaxError{lx.peek().column, "expected '->'" + lx.found()};
    lx.take();
    while (lx.peek().kind != Token::End) r.daughters.push_back(parse_category(lx));
    g.rules.push_back(std::move(r));
  } else if (kw == "lex") {
    LexEntry e;
    e.line = lineno;
    if (lx.peek().kind != Token::String)
      throw SyntaxError{lx.peek().column, "expected quoted surface string" + lx.found()};
    std::string surface = lx.take().text;
    std::size_t i = 0;
    while (i < surface.size()) {
      while (i < surface.size() && std::isspace(static_cast<unsigned char>(surface[i]))) ++i;
      std::size_t b = i;
      while (i < surface.size() && !std::isspace(static_cast<unsigned char>(surface[i]))) ++i;
      if (i > b) e.surface.push_back(surface.substr(b, i - b));
    }
    lx.expect_punct(':');
    e.category = parse_category(lx);
    expect_end(lx);
    g.lexicon.push_back(std::move(e));
  } else {
    throw SyntaxError{kw_col, "unknown keyword '" + kw + "'"};
  }
}

// Subsets are kept in domain order so printing and equality are canonical.
void canonicalize(Grammar& g) {
  auto fix = [&](Category& cat) {
    for (auto& [fname, c] : cat.constraints) {
      if (c.kind != Constraint::Kind::Subset) continue;
      const FeatureDecl* decl = g.feature(fname);
      if (!decl) continue;
      std::stable_sort(c.values.begin(), c.values.end(), [&](const auto& a, const auto& b) {
        auto ia = decl->index_of(a), ib = decl->index_of(b);
        return ia.value_or(decl->domain.size()) < ib.value_or(decl->domain.size());
      });
      c.values.erase(std::unique(c.values.begin(), c.values.end()), c.values.end());
    }
  };
  for (auto& r : g.rules) {
    fix(r.mother);
    for (auto& d : r.daughters) fix(d);
  }
  for (auto& e : g.lexicon) fix(e.category);
}

}  // namespace

Grammar parse_grammar(std::string_view source) {
  Grammar g;
  std::vector<Diagnostic> syntax;
  std::size_t lineno = 0, pos = 0;
  while (pos <= source.size()) {
    std::size_t nl = source.find('\n', pos);
    if (nl == std::string_view::npos) nl = source.size();
    std::string_view line = source.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    try {
      parse_line(line, lineno, g);
    } catch (const SyntaxError& e) {
      syntax.push_back(Diagnostic{lineno, e.column, "syntax-error", "", e.message});
    }
    pos = nl + 1;
  }
  if (!syntax.empty()) throw GrammarError(std::move(syntax));
  canonicalize(g);
  auto diags = validate(g);
  if (!diags.empty()) throw GrammarError(std::move(diags));
  return g;
}

}  // namespace ugc
