#include "ugc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace ugc {

std::vector<std::string> vocabulary(const Grammar& grammar) {
  std::set<std::string> words;
  for (const auto& e : grammar.lexicon) words.insert(e.surface.begin(), e.surface.end());
  return {words.begin(), words.end()};
}

Grammar wordplus_grammar(const std::vector<std::string>& vocab) {
  if (vocab.empty()) throw Error("Word+ grammar needs a nonempty vocabulary");
  Grammar g;
  g.start = "S";
  g.rules.push_back(Rule{"s_more", Category{"S", {}}, {Category{"W", {}}, Category{"S", {}}}, 0});
  g.rules.push_back(Rule{"s_one", Category{"S", {}}, {Category{"W", {}}}, 0});
  std::set<std::string> seen;
  for (const auto& w : vocab)
    if (seen.insert(w).second) g.lexicon.push_back(LexEntry{{w}, Category{"W", {}}, 0});
  auto diags = validate(g);
  if (!diags.empty()) throw GrammarError(std::move(diags));
  return g;
}

Grammar k_words_per_category(const Grammar& grammar, std::size_t k) {
  if (k == 0) throw Error("k must be positive");
  Grammar out = grammar;
  out.lexicon.clear();
  std::map<std::string, std::size_t> kept;
  for (const auto& e : grammar.lexicon)
    if (kept[print_category(e.category, grammar)]++ < k) out.lexicon.push_back(e);
  return out;
}

Grammar unlink_features(const Grammar& grammar, const std::string& rule_id,
                        const std::vector<std::string>& features) {
  Grammar out = grammar;
  auto it = std::find_if(out.rules.begin(), out.rules.end(), [&](const Rule& r) { return r.id == rule_id; });
  if (it == out.rules.end())
    throw GrammarError({Diagnostic{0, 0, "unknown-rule", rule_id, "no rule with this id"}});
  std::vector<Diagnostic> bad;
  for (const auto& f : features) {
    std::size_t removed = it->mother.constraints.erase(f);
    for (auto& d : it->daughters) removed += d.constraints.erase(f);
    if (removed == 0)
      bad.push_back(Diagnostic{it->line, 0, "feature-not-present", rule_id,
                               "rule does not constrain feature '" + f + "'"});
  }
  if (!bad.empty()) throw GrammarError(std::move(bad));
  return out;
}

namespace {

Delta delta(double l, double r) {
  Delta d{l, r, r - l, 1.0};
  if (l != 0) d.ratio = r / l;
  else if (r != 0) d.ratio = std::numeric_limits<double>::infinity();
  return d;
}

double distance_from_one(double ratio) {
  if (std::isinf(ratio) || ratio <= 0) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(ratio));
}

std::string num(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void kv(std::string& out, const std::string& key, const Delta& d) {
  out += key + ".left=" + num(d.left) + "\n";
  out += key + ".right=" + num(d.right) + "\n";
  out += key + ".delta=" + num(d.diff) + "\n";
  out += key + ".ratio=" + num(d.ratio) + "\n";
}

}  // namespace

DiffReport compare(const MetricsReport& left, const MetricsReport& right, const std::string& left_name,
                   const std::string& right_name) {
  DiffReport d;
  d.left = left_name;
  d.right = right_name;
  d.graphs = delta(static_cast<double>(left.per_graph.size()), static_cast<double>(right.per_graph.size()));
  d.nodes = delta(static_cast<double>(left.total_nodes), static_cast<double>(right.total_nodes));
  d.transitions = delta(static_cast<double>(left.total_transitions), static_cast<double>(right.total_transitions));
  d.max_transitions = delta(static_cast<double>(left.max_transitions_per_graph),
                            static_cast<double>(right.max_transitions_per_graph));
  std::set<std::string> cats;
  for (const auto& [c, _] : left.per_category) cats.insert(c);
  for (const auto& [c, _] : right.per_category) cats.insert(c);
  for (const auto& c : cats) {
    CategoryDelta row;
    row.category = c;
    CategorySize l, r;
    if (auto it = left.per_category.find(c); it != left.per_category.end()) {
      row.in_left = true;
      l = it->second;
    }
    if (auto it = right.per_category.find(c); it != right.per_category.end()) {
      row.in_right = true;
      r = it->second;
    }
    row.graphs = delta(static_cast<double>(l.graph_count), static_cast<double>(r.graph_count));
    row.mean_nodes = delta(l.mean_nodes, r.mean_nodes);
    row.mean_transitions = delta(l.mean_transitions, r.mean_transitions);
    d.categories.push_back(std::move(row));
  }
  std::stable_sort(d.categories.begin(), d.categories.end(), [](const CategoryDelta& a, const CategoryDelta& b) {
    bool ab = a.in_left && a.in_right, bb = b.in_left && b.in_right;
    if (ab != bb) return ab;
    if (!ab) return false;
    return distance_from_one(a.mean_transitions.ratio) > distance_from_one(b.mean_transitions.ratio);
  });
  return d;
}

std::string format_diff(const DiffReport& d) {
  std::string out = "left=" + d.left + "\nright=" + d.right + "\n";
  kv(out, "graphs", d.graphs);
  kv(out, "total_nodes", d.nodes);
  kv(out, "total_transitions", d.transitions);
  kv(out, "max_transitions_per_graph", d.max_transitions);
  for (std::size_t i = 0; i < d.categories.size(); ++i) {
    const auto& c = d.categories[i];
    std::string key = "category." + c.category;
    out += key + ".rank=" + std::to_string(i + 1) + "\n";
    kv(out, key + ".graphs", c.graphs);
    kv(out, key + ".mean_nodes", c.mean_nodes);
    kv(out, key + ".mean_transitions", c.mean_transitions);
  }
  return out;
}

std::string diff_table(const DiffReport& d) {
  std::size_t w = 8;
  for (const auto& c : d.categories) w = std::max(w, c.category.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %13s %13s %10s %10s\n", static_cast<int>(w), "category",
                "graphs", "mean_trans", "ratio", "node_ratio");
  out += buf;
  for (const auto& c : d.categories) {
    std::snprintf(buf, sizeof buf, "%-*s %6.0f->%-6.0f %6.1f->%-6.1f %10s %10s\n", static_cast<int>(w),
                  c.category.c_str(), c.graphs.left, c.graphs.right, c.mean_transitions.left,
                  c.mean_transitions.right, num(c.mean_transitions.ratio).c_str(),
                  num(c.mean_nodes.ratio).c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "nodes %.0f -> %.0f (x%s), transitions %.0f -> %.0f (x%s)\n", d.nodes.left,
                d.nodes.right, num(d.nodes.ratio).c_str(), d.transitions.left, d.transitions.right,
                num(d.transitions.ratio).c_str());
  out += buf;
  return out;
}

}  // namespace ugc
