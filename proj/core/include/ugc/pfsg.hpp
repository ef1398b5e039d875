#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ugc/cfg.hpp"

namespace ugc {

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string label;  // terminal token, or graph name when `ref`
  bool ref = false;
  double prob = 1.0;

  bool operator==(const Transition&) const = default;
};

/// One probabilistic finite-state graph. Node 0 is the start node and node
/// `nodes - 1` the end node.
struct Pfsg {
  std::string name;
  std::size_t nodes = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<Transition> transitions;  // sorted by (from, to, ref, label)

  bool operator==(const Pfsg&) const = default;
};

struct PfsgSet {
  std::string top;
  std::map<std::string, Pfsg> graphs;

  bool operator==(const PfsgSet&) const = default;
};

/// One graph per nonterminal, epsilon-free and trimmed, with uniform
/// probability over the outgoing transitions of each node. Throws
/// CompileError on unresolved references or nullable productions.
PfsgSet build_pfsg(const ContextFreeGrammar& cfg);

/// Deterministic text dump: `graph <name> nodes=<n> start=<i> end=<j>` then
/// `t <from> <to> <word|@graph> <prob>` lines.
std::string dump_pfsg(const PfsgSet& set);

struct GraphSize {
  std::size_t nodes = 0;
  std::size_t transitions = 0;
  bool operator==(const GraphSize&) const = default;
};

struct CategorySize {
  std::size_t graph_count = 0;
  double mean_nodes = 0;
  double mean_transitions = 0;
  bool operator==(const CategorySize&) const = default;
};

struct MetricsReport {
  std::size_t total_nodes = 0;
  std::size_t total_transitions = 0;
  std::size_t max_transitions_per_graph = 0;
  std::map<std::string, GraphSize> per_graph;
  std::map<std::string, CategorySize> per_category;

  bool operator==(const MetricsReport&) const = default;
};

/// Category of a graph name: everything before the first `__`.
std::string graph_category(std::string_view name);

MetricsReport measure(const PfsgSet& set);

/// key=value lines, preceded by a comment stating the counting convention.
std::string format_metrics(const MetricsReport& report);
MetricsReport parse_metrics(std::string_view text);
MetricsReport load_metrics(const std::string& path);

/// Human-readable per-category table followed by totals.
std::string metrics_table(const MetricsReport& report);

}  // namespace ugc
