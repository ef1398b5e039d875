#include "ugc/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ugc {

std::optional<std::size_t> FeatureDecl::index_of(std::string_view value) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == value) return i;
  return std::nullopt;
}

Constraint Constraint::atom(std::string value) {
  Constraint c;
  c.kind = Kind::Atom;
  c.values.push_back(std::move(value));
  return c;
}

Constraint Constraint::subset(std::vector<std::string> values) {
  Constraint c;
  c.kind = Kind::Subset;
  c.values = std::move(values);
  return c;
}

Constraint Constraint::variable(std::string name) {
  Constraint c;
  c.kind = Kind::Var;
  c.var = std::move(name);
  return c;
}

const Constraint* Category::find(std::string_view feature) const {
  auto it = constraints.find(std::string(feature));
  return it == constraints.end() ? nullptr : &it->second;
}

std::string LexEntry::label() const {
  std::string s = "\"";
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (i) s += ' ';
    s += surface[i];
  }
  return s + "\"";
}

const FeatureDecl* Grammar::feature(std::string_view name) const {
  for (const auto& f : features)
    if (f.name == name) return &f;
  return nullptr;
}

std::optional<std::size_t> Grammar::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  return std::nullopt;
}

const Rule* Grammar::rule(std::string_view id) const {
  for (const auto& r : rules)
    if (r.id == id) return &r;
  return nullptr;
}

bool is_variable_name(std::string_view ident) {
  return !ident.empty() && std::isupper(static_cast<unsigned char>(ident.front()));
}

Grammar load_grammar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError({Diagnostic{0, 0, "io-error", path, "cannot read grammar file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool valid_symbol_chars(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return s.find("__") == std::string_view::npos;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

struct Validator {
  const Grammar& g;
  std::vector<Diagnostic> out;

  void add(std::size_t line, std::string code, std::string subject, std::string msg) {
    out.push_back(Diagnostic{line, 0, std::move(code), std::move(subject), std::move(msg)});
  }

  // Checks one category; `vars` accumulates variable -> feature domain for the rule.
  void check_category(const Category& cat, std::size_t line, const std::string& subject,
                      bool lexical, std::map<std::string, const FeatureDecl*>* vars) {
    if (!valid_symbol_chars(cat.symbol))
      add(line, "bad-symbol", subject, "symbol '" + cat.symbol + "' is not a plain identifier");
    for (const auto& [fname, c] : cat.constraints) {
      const FeatureDecl* decl = g.feature(fname);
      if (!decl) {
        add(line, "unknown-feature", subject, "feature '" + fname + "' is not declared");
        continue;
      }
      switch (c.kind) {
        case Constraint::Kind::Atom:
        case Constraint::Kind::Subset:
          if (c.values.empty())
            add(line, "empty-subset", subject, "feature '" + fname + "' has an empty value set");
          for (const auto& v : c.values)
            if (!decl->index_of(v))
              add(line, "value-outside-domain", subject,
                  "value '" + v + "' is not in the domain of feature '" + fname + "'");
          break;
        case Constraint::Kind::Var:
          if (lexical) {
            add(line, "variable-in-lexicon", subject,
                "lexical entries may not use variable '" + c.var + "'");
          } else if (vars) {
            auto [it, inserted] = vars->emplace(c.var, decl);
            if (!inserted && it->second->domain != decl->domain)
              add(line, "variable-domain-mismatch", subject,
                  "variable '" + c.var + "' links '" + it->second->name + "' and '" + fname +
                      "', whose domains differ");
          }
          break;
      }
    }
  }

  void run() {
    std::set<std::string> names;
    for (const auto& f : g.features) {
      if (!names.insert(f.name).second)
        add(0, "duplicate-feature", f.name, "feature '" + f.name + "' declared twice");
      if (f.domain.empty())
        add(0, "empty-domain", f.name, "feature '" + f.name + "' has an empty domain");
      if (f.domain.size() > 64)
        add(0, "domain-too-large", f.name, "feature domains are limited to 64 values");
      std::set<std::string> seen;
      for (const auto& v : f.domain) {
        if (!seen.insert(v).second)
          add(0, "duplicate-value", f.name, "value '" + v + "' repeated in domain");
        if (is_variable_name(v))
          add(0, "bad-value", f.name, "value '" + v + "' would read as a variable");
      }
    }

    std::set<std::string> mothers, lexical;
    for (const auto& r : g.rules) mothers.insert(r.mother.symbol);
    for (const auto& e : g.lexicon) lexical.insert(e.category.symbol);

    std::set<std::string> ids;
    for (const auto& r : g.rules) {
      if (!ids.insert(r.id).second)
        add(r.line, "duplicate-rule", r.id, "rule id '" + r.id + "' used twice");
      if (r.daughters.empty())
        add(r.line, "epsilon-rule", r.id, "rules must have at least one daughter");
      std::map<std::string, const FeatureDecl*> vars;
      check_category(r.mother, r.line, r.id, false, &vars);
      for (const auto& d : r.daughters) {
        check_category(d, r.line, r.id, false, &vars);
        if (!mothers.count(d.symbol) && !lexical.count(d.symbol))
          add(r.line, "undefined-symbol", r.id,
              "symbol '" + d.symbol + "' has no rule and no lexical entry");
      }
    }

    for (const auto& e : g.lexicon) {
      if (e.surface.empty())
        add(e.line, "bad-token", e.label(), "lexical entry has no tokens");
      for (const auto& t : e.surface) {
        bool ok = !t.empty();
        for (char ch : t)
          if (std::isspace(static_cast<unsigned char>(ch)) ||
              std::isupper(static_cast<unsigned char>(ch)) || ch == '"')
            ok = false;
        if (!ok) add(e.line, "bad-token", e.label(), "token '" + t + "' must be lowercase");
      }
      check_category(e.category, e.line, e.label(), true, nullptr);
    }

    std::map<std::string, std::string> folded;
    auto note_symbol = [&](const std::string& sym, std::size_t line) {
      auto [it, inserted] = folded.emplace(lower(sym), sym);
      if (!inserted && it->second != sym)
        add(line, "symbol-collision", sym,
            "symbols '" + it->second + "' and '" + sym + "' differ only in case");
    };
    for (const auto& r : g.rules) note_symbol(r.mother.symbol, r.line);
    for (const auto& e : g.lexicon) note_symbol(e.category.symbol, e.line);

    if (g.start.empty())
      add(g.start_line, "missing-start", "", "no start symbol declared");
    else if (!mothers.count(g.start))
      add(g.start_line, "unreachable-start", g.start,
          "start symbol '" + g.start + "' is not the mother of any rule");

    std::stable_sort(out.begin(), out.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  }
};

}  // namespace

std::vector<Diagnostic> validate(const Grammar& grammar) {
  Validator v{grammar, {}};
  v.run();
  return std::move(v.out);
}

// ---------------------------------------------------------------------------
// Printing

std::string print_category(const Category& cat, const Grammar& grammar) {
  std::string s = cat.symbol;
  if (cat.constraints.empty()) return s;
  std::vector<std::pair<std::size_t, const std::string*>> order;
  for (const auto& [name, c] : cat.constraints) {
    auto idx = grammar.feature_index(name);
    order.emplace_back(idx ? *idx : grammar.features.size(), &name);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  s += ":[";
  bool first = true;
  for (const auto& [_, name] : order) {
    const Constraint& c = cat.constraints.at(*name);
    if (!first) s += ", ";
    first = false;
    s += *name + "=";
    switch (c.kind) {
      case Constraint::Kind::Atom:
        s += c.values.front();
        break;
      case Constraint::Kind::Subset: {
        s += "{";
        for (std::size_t i = 0; i < c.values.size(); ++i) s += (i ? "," : "") + c.values[i];
        s += "}";
        break;
      }
      case Constraint::Kind::Var:
        s += c.var;
        break;
    }
  }
  return s + "]";
}

std::string print_grammar(const Grammar& g) {
  std::ostringstream os;
  for (const auto& f : g.features) {
    os << "feature " << f.name << ' ' << (f.kind == FeatureKind::Syntactic ? "syn" : "sem")
       << " { ";
    for (std::size_t i = 0; i < f.domain.size(); ++i) os << (i ? ", " : "") << f.domain[i];
    os << " }\n";
  }
  os << "start " << g.start << "\n";
  for (const auto& r : g.rules) {
    os << "rule " << r.id << ": " << print_category(r.mother, g) << " ->";
    for (const auto& d : r.daughters) os << ' ' << print_category(d, g);
    os << "\n";
  }
  for (const auto& e : g.lexicon)
    os << "lex " << e.label() << ": " << print_category(e.category, g) << "\n";
  return os.str();
}

}  // namespace ugc
