// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "support.hpp"
#include "ugc/compiler.hpp"
#include "ugc/language_model.hpp"

namespace fs = std::filesystem;
using namespace ugc;

namespace {

std::vector<std::string> lines_of(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(testing::read_file(path));
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

PfsgSet shuttle_pfsg(const std::string& file) {
  return build_pfsg(compile(load_grammar(testing::asset("shuttle/" + file))).cfg);
}

std::size_t size_of(const MetricsReport& m) { return m.total_nodes + m.total_transitions; }

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

bool equivalence(std::string& detail) {
  std::vector<std::string> files;
  for (const char* f : {"agreement", "center", "left_rec", "rel_linked", "rel_unlinked", "right_rec", "wordplus"})
    files.push_back(testing::asset(std::string("fixtures/") + f + ".ugr"));
  for (const char* f : {"no_rels", "rels", "unlinked"}) files.push_back(testing::asset(std::string("shuttle/") + f + ".ugr"));
  auto t0 = std::chrono::steady_clock::now();
  std::size_t passed = 0;
  for (const auto& f : files) {
    std::ostringstream out, err;
    if (cli::run({"check", f, "--max-len", "8"}, out, err) == 0) ++passed;
    else detail += fs::path(f).filename().string() + " failed; ";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail += std::to_string(passed) + "/" + std::to_string(files.size()) + " grammars equal at L=8 in " + fmt(secs, 1) + " s";
  return passed == files.size() && secs < 300;
}

bool left_recursion(std::string& detail) {
  bool ok = true;
  for (const char* name : {"lr_direct", "lr_indirect"}) {
    auto cfg = testing::cfg_fixture(name);
    auto out = eliminate_left_recursion(cfg);
    bool acyclic = !has_left_recursion(out);
    auto before = cfg_enumerate(cfg, 6), after = cfg_enumerate(out, 6);
    ok &= acyclic && before == after && has_left_recursion(cfg);
    detail += std::string(name) + ": acyclic=" + (acyclic ? "yes" : "no") + " strings=" + std::to_string(after.size()) +
              (before == after ? " equal" : " differ") + (name[3] == 'd' ? "; " : "");
  }
  return ok;
}

bool blowup(std::string& detail) {
  auto norels = measure(shuttle_pfsg("no_rels.ugr"));
  auto rels = measure(shuttle_pfsg("rels.ugr"));
  auto unlinked = measure(shuttle_pfsg("unlinked.ugr"));
  double base = static_cast<double>(size_of(norels));
  double r_rels = static_cast<double>(size_of(rels)) / base;
  double r_unl = static_cast<double>(size_of(unlinked)) / base;
  double np = rels.per_category.at("np").mean_transitions / norels.per_category.at("np").mean_transitions;
  detail = "size rels/no_rels=" + fmt(r_rels) + " unlinked/no_rels=" + fmt(r_unl) + " np mean transitions ratio=" + fmt(np);
  return r_rels >= 2.0 && r_unl <= 1.10 && np >= 3.0;
}

bool acceptance(std::string& detail) {
  Grammar g = load_grammar(testing::asset("shuttle/rels.ugr"));
  PfsgSet set = build_pfsg(compile(g).cfg);
  auto accepted = [&](const std::string& s) {
    bool oracle = oracle_parse(g, tokenize(s)).accepted;
    bool model = cfg_parse(set, tokenize(s)).accepted;
    return oracle && model ? 1 : (!oracle && !model ? 0 : -1);
  };
  std::size_t corpus_ok = 0, pairs_ok = 0;
  auto corpus = lines_of(testing::asset("shuttle/corpus.txt"));
  for (const auto& s : corpus)
    if (accepted(s) == 1) ++corpus_ok;
    else detail += "not parsed: " + s + "; ";
  auto pairs = lines_of(testing::asset("shuttle/pairs.txt"));
  for (const auto& line : pairs) {
    auto tab = line.find('\t');
    std::string verdict = line.substr(0, tab), s = line.substr(tab + 1);
    if (accepted(s) == (verdict == "accept" ? 1 : 0)) ++pairs_ok;
    else detail += "wrong verdict: " + s + "; ";
  }
  detail += std::to_string(corpus_ok) + "/" + std::to_string(corpus.size()) + " coverage sentences, " +
            std::to_string(pairs_ok) + "/" + std::to_string(pairs.size()) + " minimal pairs";
  return corpus.size() == 12 && corpus_ok == corpus.size() && pairs_ok == pairs.size();
}

bool reduction(std::string& detail) {
  auto stats = compile(load_grammar(testing::asset("shuttle/rels.ugr"))).stats;
  detail = "naive=" + stats.naive_count + " emitted=" + std::to_string(stats.emitted_rules) +
           " factor=" + stats.reduction_factor;
  return stats.reduction_log10 >= 3.0;
}

bool determinism(std::string& detail) {
  fs::path root = fs::temp_directory_path() / ("ugc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::string> digests[2];
  for (int i = 0; i < 2; ++i) {
    fs::path dir = root / std::to_string(i);
    std::ostringstream out, err;
    if (cli::run({"compile", testing::asset("shuttle/rels.ugr"), "--out", dir.string()}, out, err) != 0) return false;
    for (const char* f : {"grammar.cfg", "grammar.pfsg", "grammar.metrics", "grammar.stats"}) {
      std::ostringstream h;
      h << std::hex << std::hash<std::string>{}(testing::read_file((dir / f).string()));
      digests[i].push_back(h.str());
    }
    digests[i].push_back(std::to_string(std::hash<std::string>{}(out.str())));
  }
  fs::remove_all(root);
  detail = "cfg hash " + digests[0][0] + (digests[0] == digests[1] ? ", all artifacts identical" : ", artifacts differ");
  return digests[0] == digests[1];
}

bool normalization(std::string& detail) {
  double worst = 0;
  std::size_t nodes = 0;
  auto scan = [&](const PfsgSet& set) {
    for (const auto& [name, g] : set.graphs) {
      std::vector<double> out(g.nodes, 0.0);
      for (const auto& t : g.transitions) out[t.from] += t.prob;
      for (std::size_t n = 0; n < g.nodes; ++n)
        if (n != g.end) {
          worst = std::max(worst, std::abs(out[n] - 1.0));
          ++nodes;
        }
    }
  };
  for (const char* f : {"no_rels.ugr", "rels.ugr", "unlinked.ugr"}) scan(shuttle_pfsg(f));
  for (const char* f : {"agreement", "center", "left_rec", "rel_linked", "rel_unlinked", "right_rec", "wordplus"})
    scan(build_pfsg(compile(testing::fixture(f)).cfg));
  double ppl = perplexity(testing::cfg_fixture("intj"), {"yes"}).perplexity;
  detail = std::to_string(nodes) + " nodes, max deviation " + std::to_string(worst) + ", intj perplexity " + fmt(ppl, 6);
  return worst <= 1e-9 && ppl == 2.0;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool(std::string&)>>> criteria = {
      {"equivalence", equivalence}, {"left recursion", left_recursion}, {"blowup", blowup},
      {"linguistic acceptance", acceptance}, {"reduction", reduction}, {"determinism", determinism},
      {"normalization", normalization}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].second(detail);
    } catch (const std::exception& e) {
      detail += std::string(" error: ") + e.what();
    }
    failed += !ok;
    std::cout << "criterion " << i + 1 << " " << (ok ? "PASS" : "FAIL") << " " << criteria[i].first << ": " << detail
              << std::endl;
  }
  return failed ? 1 : 0;
}
