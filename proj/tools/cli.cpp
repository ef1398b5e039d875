#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ugc/analysis.hpp"
#include "ugc/check.hpp"
#include "ugc/compiler.hpp"
#include "ugc/language_model.hpp"
#include "ugc/oracle.hpp"
#include "ugc/pfsg.hpp"

namespace ugc::cli {
namespace {

struct Options {
  std::string features = "syn";
  std::vector<std::string> unlink;
  bool wordplus = false;
  std::size_t kwords = 0;
  std::size_t max_len = 8;
  std::string out_dir = ".";
  std::size_t cap_strings = 1'000'000;
  std::size_t cap_tuples = 10'000'000;
  std::string mutate;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool is_cfg_file(const std::string& path) { return std::filesystem::path(path).extension() == ".cfg"; }

Grammar prepare(const std::string& path, const Options& o) {
  Grammar g = load_grammar(path);
  for (const auto& directive : o.unlink) {
    auto colon = directive.find(':');
    if (colon == std::string::npos || colon == 0)
      throw GrammarError({Diagnostic{0, 0, "bad-unlink", directive, "expected RULE:F1,F2"}});
    g = unlink_features(g, directive.substr(0, colon), split(directive.substr(colon + 1), ','));
  }
  if (o.wordplus) g = wordplus_grammar(vocabulary(g));
  if (o.kwords > 0) g = k_words_per_category(g, o.kwords);
  return g;
}

FeatureSelection selection(const Options& o) {
  if (o.features == "syn") return FeatureSelection::syntactic();
  if (o.features == "all") return FeatureSelection::all();
  return FeatureSelection::list(split(o.features, ','));
}

CompileLimits limits(const Options& o) { return CompileLimits{o.cap_tuples}; }

void drop_last_alternative(ContextFreeGrammar& cfg) {
  for (auto& [name, p] : cfg.productions)
    if (p.alternatives.size() > 1) {
      p.alternatives.pop_back();
      p.origins.pop_back();
      return;
    }
}

std::string stats_text(const Compilation& c) {
  std::string feats;
  for (const auto& f : c.grammar.features) feats += (feats.empty() ? "" : ",") + f.name;
  std::string out = "features=" + feats + "\n";
  out += "rules=" + std::to_string(c.grammar.rules.size()) + "\n";
  out += "lexical_entries=" + std::to_string(c.grammar.lexicon.size()) + "\n";
  out += c.stats.str();
  out += "nonterminals=" + std::to_string(c.cfg.productions.size()) + "\n";
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

std::vector<std::string> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read corpus " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    out.push_back(join_tokens(toks));
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_compile(const std::string& file, const Options& o, std::ostream& out) {
  Compilation c = compile(prepare(file, o), selection(o), limits(o));
  PfsgSet set = build_pfsg(c.cfg);
  MetricsReport m = measure(set);
  std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "grammar.cfg", print_cfg(c.cfg));
  write_file(dir / "grammar.pfsg", dump_pfsg(set));
  write_file(dir / "grammar.metrics", format_metrics(m));
  std::string stats = stats_text(c);
  write_file(dir / "grammar.stats", stats);
  out << stats;
  out << "total_nodes=" << m.total_nodes << "\ntotal_transitions=" << m.total_transitions << "\n";
  return kOk;
}

int cmd_check(const std::string& file, const Options& o, std::ostream& out) {
  Grammar g = prepare(file, o);
  auto kept = selected_features(g, selection(o));
  Compilation c = compile(g, selection(o), limits(o));
  if (o.mutate == "drop-last-alt") drop_last_alternative(c.cfg);
  else if (!o.mutate.empty()) throw Error("unknown mutation '" + o.mutate + "'");
  CheckResult r = check_equivalence(g, kept, c.cfg, o.max_len, o.cap_strings);
  out << "max_len=" << o.max_len << "\n";
  out << "oracle_strings=" << r.oracle_strings << "\n";
  out << "cfg_strings=" << r.cfg_strings << "\n";
  for (const auto& s : r.oracle_only) out << "oracle-only: " << s << "\n";
  for (const auto& s : r.cfg_only) out << "cfg-only: " << s << "\n";
  out << (r.equal ? "PASS" : "FAIL") << "\n";
  return r.equal ? kOk : kCheckFailed;
}

PfsgSet graphs_for(const std::string& file, const Options& o) {
  if (is_cfg_file(file)) return build_pfsg(load_cfg(file));
  return build_pfsg(compile(prepare(file, o), selection(o), limits(o)).cfg);
}

int cmd_stats(const std::string& file, const Options& o, std::ostream& out) {
  MetricsReport m = measure(graphs_for(file, o));
  out << metrics_table(m) << format_metrics(m);
  return kOk;
}

int cmd_diff(const std::string& left, const std::string& right, bool kv, std::ostream& out) {
  DiffReport d = compare(load_metrics(left), load_metrics(right), left, right);
  out << (kv ? format_diff(d) : diff_table(d));
  return kOk;
}

int cmd_parse(const std::string& file, const std::string& sentence, const Options& o, std::size_t trees,
              std::ostream& out) {
  Tokens toks = tokenize(sentence);
  std::optional<Grammar> g;
  ContextFreeGrammar cfg;
  if (is_cfg_file(file)) {
    cfg = load_cfg(file);
  } else {
    g = prepare(file, o);
    cfg = compile(*g, selection(o), limits(o)).cfg;
  }
  CfgParseResult r = cfg_parse(cfg, toks);
  out << (r.accepted ? "ACCEPT" : "REJECT") << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", r.log_prob);
  out << "log_prob=" << (r.accepted ? buf : "-inf") << "\n";
  out << "paths=" << r.derivation_count << "\n";
  if (g) {
    OracleParseOptions po;
    po.feature_filter = selected_features(*g, selection(o));
    po.max_trees = trees;
    try {
      ParseResult pr = oracle_parse(*g, toks, po);
      out << "oracle=" << (pr.accepted ? "ACCEPT" : "REJECT") << " derivations=" << pr.derivation_count << "\n";
      for (const auto& t : pr.derivations) out << t << "\n";
    } catch (const UnknownTokenError& e) {
      out << "oracle=REJECT " << e.what() << "\n";
    }
  }
  return kOk;
}

int cmd_enumerate(const std::string& file, const Options& o, bool oracle, std::ostream& out) {
  StringSet set;
  if (is_cfg_file(file)) {
    set = cfg_enumerate(load_cfg(file), o.max_len, o.cap_strings);
  } else {
    Grammar g = prepare(file, o);
    if (oracle) {
      OracleEnumerateOptions eo;
      eo.feature_filter = selected_features(g, selection(o));
      eo.string_cap = o.cap_strings;
      set = oracle_enumerate(g, o.max_len, eo);
    } else {
      set = cfg_enumerate(compile(g, selection(o), limits(o)).cfg, o.max_len, o.cap_strings);
    }
  }
  for (const auto& s : set) out << s << "\n";
  return kOk;
}

int cmd_perplexity(const std::string& file, const std::string& corpus, const Options& o, std::ostream& out) {
  PerplexityResult r = perplexity(graphs_for(file, o), read_corpus(corpus));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", r.perplexity);
  out << "perplexity=" << buf << "\n";
  out << "sentences=" << r.sentences << "\nwords=" << r.words << "\nrejected=" << r.rejected.size() << "\n";
  for (const auto& s : r.rejected) out << "out-of-language: " << s << "\n";
  return kOk;
}

int cmd_variant(const std::string& file, const Options& o, bool strip, std::ostream& out) {
  Grammar g = prepare(file, o);
  if (strip) g = strip_features(g, selection(o));
  out << print_grammar(g);
  return kOk;
}

void add_variant_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--features", o.features, "syn, all, or a comma-separated feature list");
  cmd->add_option("--unlink", o.unlink, "RULE:F1,F2 (repeatable)");
  auto* wp = cmd->add_flag("--wordplus", o.wordplus, "replace the grammar by Word+ over its vocabulary");
  cmd->add_option("--kwords", o.kwords, "keep the first K entries per lexical category")
      ->check(CLI::PositiveNumber)
      ->excludes(wp);
  cmd->add_option("--cap-tuples", o.cap_tuples, "instantiation tuple cap");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unification grammar to CFG/PFSG compiler", "ugc"};
  app.require_subcommand(1);
  Options o;
  std::string file, second;
  bool kv = false, oracle = false, strip = false;
  std::size_t trees = 0;

  auto* compile_cmd = app.add_subcommand("compile", "compile a grammar and write artifacts");
  compile_cmd->add_option("grammar", file)->required();
  add_variant_flags(compile_cmd, o);
  compile_cmd->add_option("--out", o.out_dir, "output directory");

  auto* check_cmd = app.add_subcommand("check", "compare oracle and CFG languages up to --max-len");
  check_cmd->add_option("grammar", file)->required();
  add_variant_flags(check_cmd, o);
  check_cmd->add_option("--max-len", o.max_len)->check(CLI::PositiveNumber);
  check_cmd->add_option("--cap-strings", o.cap_strings);
  check_cmd->add_option("--mutate", o.mutate, "testing only: drop-last-alt");

  auto* stats_cmd = app.add_subcommand("stats", "PFSG size metrics of a .ugr or .cfg file");
  stats_cmd->add_option("grammar", file)->required();
  add_variant_flags(stats_cmd, o);

  auto* diff_cmd = app.add_subcommand("diff", "compare two metrics files");
  diff_cmd->add_option("left", file)->required();
  diff_cmd->add_option("right", second)->required();
  diff_cmd->add_flag("--kv", kv, "key=value output");

  auto* parse_cmd = app.add_subcommand("parse", "parse one sentence");
  parse_cmd->add_option("grammar", file)->required();
  parse_cmd->add_option("sentence", second)->required();
  add_variant_flags(parse_cmd, o);
  parse_cmd->add_option("--trees", trees, "print up to N oracle trees");

  auto* enum_cmd = app.add_subcommand("enumerate", "list sentences up to --max-len");
  enum_cmd->add_option("grammar", file)->required();
  add_variant_flags(enum_cmd, o);
  enum_cmd->add_option("--max-len", o.max_len)->check(CLI::PositiveNumber);
  enum_cmd->add_option("--cap-strings", o.cap_strings);
  enum_cmd->add_flag("--oracle", oracle, "enumerate with the unification oracle");

  auto* ppl_cmd = app.add_subcommand("perplexity", "corpus perplexity under uniform choice");
  ppl_cmd->add_option("grammar", file)->required();
  ppl_cmd->add_option("corpus", second)->required();
  add_variant_flags(ppl_cmd, o);

  auto* variant_cmd = app.add_subcommand("variant", "print a grammar variant in the DSL");
  variant_cmd->add_option("grammar", file)->required();
  add_variant_flags(variant_cmd, o);
  variant_cmd->add_flag("--strip", strip, "also drop features outside --features");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInputError;
  }

  try {
    if (*compile_cmd) return cmd_compile(file, o, out);
    if (*check_cmd) return cmd_check(file, o, out);
    if (*stats_cmd) return cmd_stats(file, o, out);
    if (*diff_cmd) return cmd_diff(file, second, kv, out);
    if (*parse_cmd) return cmd_parse(file, second, o, trees, out);
    if (*enum_cmd) return cmd_enumerate(file, o, oracle, out);
    if (*ppl_cmd) return cmd_perplexity(file, second, o, out);
    if (*variant_cmd) return cmd_variant(file, o, strip, out);
  } catch (const GrammarError& e) {
    for (const auto& d : e.diagnostics()) err << file << ": " << d.str() << "\n";
    return kInputError;
  } catch (const ResourceLimitError& e) {
    err << "ugc: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::exception& e) {
    err << "ugc: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace ugc::cli
