#include "ugc/pfsg.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace ugc {
namespace {

struct Edge {
  std::size_t from, to;
  bool eps;
  bool ref;
  std::string label;
};

// Thompson-style construction with epsilon edges, removed afterwards.
class GraphBuilder {
 public:
  Pfsg build(const std::string& name, const Production& prod) {
    nodes_ = 2;
    edges_.clear();
    for (const auto& a : prod.alternatives) expand(a, 0, 1);
    return finish(name);
  }

 private:
  std::size_t fresh() { return nodes_++; }

  void expand(const Expr& e, std::size_t p, std::size_t q) {
    switch (e.kind) {
      case Expr::Kind::Terminal:
        edges_.push_back(Edge{p, q, false, false, e.text});
        break;
      case Expr::Kind::Ref:
        edges_.push_back(Edge{p, q, false, true, e.text});
        break;
      case Expr::Kind::Seq: {
        std::size_t cur = p;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          std::size_t next = i + 1 == e.children.size() ? q : fresh();
          expand(e.children[i], cur, next);
          cur = next;
        }
        break;
      }
      case Expr::Kind::Alt:
        for (const auto& c : e.children) expand(c, p, q);
        break;
      case Expr::Kind::Star: {
        std::size_t h = fresh();
        edges_.push_back(Edge{p, h, true, false, {}});
        expand(e.children.front(), h, h);
        edges_.push_back(Edge{h, q, true, false, {}});
        break;
      }
    }
  }

  std::vector<std::vector<std::size_t>> closures() const {
    std::vector<std::vector<std::size_t>> eps(nodes_);
    for (const auto& e : edges_)
      if (e.eps) eps[e.from].push_back(e.to);
    std::vector<std::vector<std::size_t>> out(nodes_);
    for (std::size_t v = 0; v < nodes_; ++v) {
      std::vector<bool> seen(nodes_, false);
      std::vector<std::size_t> stack{v};
      seen[v] = true;
      while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        out[v].push_back(x);
        for (std::size_t y : eps[x])
          if (!seen[y]) {
            seen[y] = true;
            stack.push_back(y);
          }
      }
      std::sort(out[v].begin(), out[v].end());
    }
    return out;
  }

  Pfsg finish(const std::string& name) {
    auto close = closures();
    std::vector<bool> important(nodes_, false);
    important[0] = important[1] = true;
    std::vector<std::vector<const Edge*>> out(nodes_);
    for (const auto& e : edges_)
      if (!e.eps) {
        important[e.from] = true;
        out[e.from].push_back(&e);
      }
    if (std::binary_search(close[0].begin(), close[0].end(), std::size_t{1}))
      throw CompileError("production '" + name + "' derives the empty string");

    using Key = std::tuple<std::size_t, std::size_t, bool, std::string>;
    std::set<Key> direct;
    for (std::size_t v = 0; v < nodes_; ++v) {
      if (!important[v]) continue;
      for (std::size_t x : close[v])
        for (const Edge* e : out[x])
          for (std::size_t w : close[e->to])
            if (important[w]) direct.emplace(v, w, e->ref, e->label);
    }

    // Trim to nodes on some start -> end path.
    std::vector<std::vector<std::size_t>> fwd(nodes_), bwd(nodes_);
    for (const auto& [f, t, r, l] : direct) {
      fwd[f].push_back(t);
      bwd[t].push_back(f);
    }
    auto reach = [&](std::size_t from, const std::vector<std::vector<std::size_t>>& adj) {
      std::vector<bool> seen(nodes_, false);
      std::vector<std::size_t> stack{from};
      seen[from] = true;
      while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        for (std::size_t y : adj[x])
          if (!seen[y]) {
            seen[y] = true;
            stack.push_back(y);
          }
      }
      return seen;
    };
    auto from_start = reach(0, fwd);
    auto to_end = reach(1, bwd);
    auto live = [&](std::size_t v) { return from_start[v] && to_end[v]; };

    // Breadth-first numbering from the start node; the end node comes last.
    std::vector<std::size_t> number(nodes_, SIZE_MAX);
    std::vector<std::vector<std::size_t>> succ(nodes_);
    for (const auto& [f, t, r, l] : direct)
      if (live(f) && live(t)) succ[f].push_back(t);
    std::size_t next = 0;
    std::deque<std::size_t> queue{0};
    number[0] = next++;
    while (!queue.empty()) {
      std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y : succ[x])
        if (number[y] == SIZE_MAX && y != 1) {
          number[y] = next++;
          queue.push_back(y);
        }
    }
    number[1] = next++;

    Pfsg g;
    g.name = name;
    g.nodes = next;
    g.start = 0;
    g.end = next - 1;
    for (const auto& [f, t, r, l] : direct)
      if (live(f) && live(t)) g.transitions.push_back(Transition{number[f], number[t], l, r, 0.0});
    std::sort(g.transitions.begin(), g.transitions.end(), [](const Transition& a, const Transition& b) {
      return std::tie(a.from, a.to, a.ref, a.label) < std::tie(b.from, b.to, b.ref, b.label);
    });
    std::vector<std::size_t> degree(g.nodes, 0);
    for (const auto& t : g.transitions) ++degree[t.from];
    for (auto& t : g.transitions) t.prob = 1.0 / static_cast<double>(degree[t.from]);
    return g;
  }

  std::size_t nodes_ = 0;
  std::vector<Edge> edges_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

PfsgSet build_pfsg(const ContextFreeGrammar& cfg) {
  auto diags = validate_cfg(cfg);
  if (!diags.empty()) throw CompileError(diags.front().str());
  PfsgSet set;
  set.top = cfg.start;
  GraphBuilder b;
  for (const auto& [name, prod] : cfg.productions) set.graphs.emplace(name, b.build(name, prod));
  return set;
}

std::string dump_pfsg(const PfsgSet& set) {
  std::string out = "top " + set.top + "\n";
  for (const auto& [name, g] : set.graphs) {
    out += "graph " + name + " nodes=" + std::to_string(g.nodes) + " start=" + std::to_string(g.start) +
           " end=" + std::to_string(g.end) + "\n";
    for (const auto& t : g.transitions)
      out += "t " + std::to_string(t.from) + " " + std::to_string(t.to) + " " + (t.ref ? "@" : "") +
             t.label + " " + fixed(t.prob, 9) + "\n";
  }
  return out;
}

std::string graph_category(std::string_view name) {
  auto pos = name.find("__");
  return std::string(name.substr(0, pos));
}

MetricsReport measure(const PfsgSet& set) {
  MetricsReport r;
  std::map<std::string, GraphSize> sums;
  for (const auto& [name, g] : set.graphs) {
    GraphSize s{g.nodes, g.transitions.size()};
    r.per_graph[name] = s;
    r.total_nodes += s.nodes;
    r.total_transitions += s.transitions;
    r.max_transitions_per_graph = std::max(r.max_transitions_per_graph, s.transitions);
    auto& c = r.per_category[graph_category(name)];
    ++c.graph_count;
    sums[graph_category(name)].nodes += s.nodes;
    sums[graph_category(name)].transitions += s.transitions;
  }
  for (auto& [cat, c] : r.per_category) {
    c.mean_nodes = static_cast<double>(sums[cat].nodes) / c.graph_count;
    c.mean_transitions = static_cast<double>(sums[cat].transitions) / c.graph_count;
  }
  return r;
}

std::string format_metrics(const MetricsReport& r) {
  std::string out =
      "# nodes and transitions per graph; terminals are counted as inline transitions\n";
  out += "graphs=" + std::to_string(r.per_graph.size()) + "\n";
  out += "total_nodes=" + std::to_string(r.total_nodes) + "\n";
  out += "total_transitions=" + std::to_string(r.total_transitions) + "\n";
  out += "max_transitions_per_graph=" + std::to_string(r.max_transitions_per_graph) + "\n";
  for (const auto& [cat, c] : r.per_category) {
    out += "category." + cat + ".graphs=" + std::to_string(c.graph_count) + "\n";
    out += "category." + cat + ".mean_nodes=" + fixed(c.mean_nodes, 6) + "\n";
    out += "category." + cat + ".mean_transitions=" + fixed(c.mean_transitions, 6) + "\n";
  }
  for (const auto& [name, g] : r.per_graph) {
    out += "graph." + name + ".nodes=" + std::to_string(g.nodes) + "\n";
    out += "graph." + name + ".transitions=" + std::to_string(g.transitions) + "\n";
  }
  return out;
}

MetricsReport parse_metrics(std::string_view text) {
  MetricsReport r;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& msg) {
    throw GrammarError({Diagnostic{lineno, 1, "bad-metrics", "", msg}});
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) bad("expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    try {
      if (key == "graphs") continue;
      if (key == "total_nodes") r.total_nodes = std::stoull(value);
      else if (key == "total_transitions") r.total_transitions = std::stoull(value);
      else if (key == "max_transitions_per_graph") r.max_transitions_per_graph = std::stoull(value);
      else {
        auto first = key.find('.'), last = key.rfind('.');
        if (first == std::string::npos || first == last) bad("unknown key '" + key + "'");
        std::string kind = key.substr(0, first), name = key.substr(first + 1, last - first - 1),
                    field = key.substr(last + 1);
        if (kind == "category") {
          auto& c = r.per_category[name];
          if (field == "graphs") c.graph_count = std::stoull(value);
          else if (field == "mean_nodes") c.mean_nodes = std::stod(value);
          else if (field == "mean_transitions") c.mean_transitions = std::stod(value);
          else bad("unknown key '" + key + "'");
        } else if (kind == "graph") {
          auto& g = r.per_graph[name];
          if (field == "nodes") g.nodes = std::stoull(value);
          else if (field == "transitions") g.transitions = std::stoull(value);
          else bad("unknown key '" + key + "'");
        } else {
          bad("unknown key '" + key + "'");
        }
      }
    } catch (const std::logic_error&) {
      bad("bad number in '" + line + "'");
    }
  }
  return r;
}

MetricsReport load_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError({Diagnostic{0, 0, "io-error", path, "cannot read metrics file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_metrics(ss.str());
}

std::string metrics_table(const MetricsReport& r) {
  std::size_t w = 8;
  for (const auto& [cat, _] : r.per_category) w = std::max(w, cat.size());
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-*s %8s %12s %12s\n", static_cast<int>(w), "category", "graphs",
                "mean_nodes", "mean_trans");
  out += buf;
  for (const auto& [cat, c] : r.per_category) {
    std::snprintf(buf, sizeof buf, "%-*s %8zu %12.2f %12.2f\n", static_cast<int>(w), cat.c_str(),
                  c.graph_count, c.mean_nodes, c.mean_transitions);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "graphs %zu, nodes %zu, transitions %zu, max transitions/graph %zu\n",
                r.per_graph.size(), r.total_nodes, r.total_transitions, r.max_transitions_per_graph);
  out += buf;
  return out;
}

}  // namespace ugc
