#pragma once

// Entity dependence graphs and the degree of dependence.
//
// Nodes are entities instantiated at statements. An edge a_i -> b_j says the
// value of b_j is computed directly from the value of a_i; its weight is the
// max back-edge count of a node-simple CFG path i -> j (forward) or j -> i
// (backward), or of a simple CFG cycle when i == j.
//
// Degree of dependence: the graph is condensed into strongly connected
// components. Edges between components are charged their weight. A cyclic
// component is charged Hhat x (its heaviest simple cycle); its cycles all
// overlap, and any part of a path that stays inside it is covered by those
// circuits. With monotonic entity dependence only the heaviest cycle along
// a path is charged, otherwise every cyclic component on the path is.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfbound/analyses.hpp"
#include "dfbound/cfg_metrics.hpp"
#include "dfbound/solver.hpp"

namespace dfbound {

struct entity_node {
  std::string entity;  // variable name, or "(expr)" for available expressions
  node_id stmt = 0;
  bool independent = false;  // can turn non-top without any incoming dependence

  std::string name() const { return entity + "_" + std::to_string(stmt); }
};

struct edg_edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::uint32_t weight = 0;
};

class entity_dependence_graph {
 public:
  analysis_kind kind = analysis_kind::constant_propagation;
  direction dir = direction::forward;

  const std::vector<entity_node>& nodes() const noexcept { return nodes_; }
  const std::vector<edg_edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::size_t add_node(entity_node n) {
    const auto key = std::make_pair(n.entity, n.stmt);
    if (auto it = by_key_.find(key); it != by_key_.end()) return it->second;
    by_key_.emplace(key, nodes_.size());
    nodes_.push_back(std::move(n));
    out_.emplace_back();
    in_degree_.push_back(0);
    return nodes_.size() - 1;
  }

  // Parallel edges are not kept.
  void add_edge(std::size_t src, std::size_t dst, std::uint32_t weight) {
    if (!edge_keys_.insert({src, dst}).second) return;
    out_[src].push_back(edges_.size());
    edges_.push_back({src, dst, weight});
    ++in_degree_[dst];
  }

  std::optional<std::size_t> find(const std::string& entity, node_id stmt) const {
    auto it = by_key_.find({entity, stmt});
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].name() == name) return i;
    return std::nullopt;
  }

  std::optional<edg_edge> edge_between(std::size_t src, std::size_t dst) const {
    for (std::size_t e : out_[src])
      if (edges_[e].dst == dst) return edges_[e];
    return std::nullopt;
  }

  const std::vector<std::size_t>& out_edges(std::size_t n) const { return out_[n]; }
  std::size_t in_degree(std::size_t n) const { return in_degree_[n]; }

 private:
  std::vector<entity_node> nodes_;
  std::vector<edg_edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> in_degree_;
  std::map<std::pair<std::string, node_id>, std::size_t> by_key_;
  std::set<std::pair<std::size_t, std::size_t>> edge_keys_;
};

namespace detail {

// Oriented statement-pair weights, cached per pair.
class edg_weigher {
 public:
  edg_weigher(const backedge_paths& paths, direction dir) : paths_(paths), dir_(dir) {}

  std::uint32_t operator()(node_id src_stmt, node_id dst_stmt) {
    const node_id from = dir_ == direction::forward ? src_stmt : dst_stmt;
    const node_id to = dir_ == direction::forward ? dst_stmt : src_stmt;
    const auto key = std::make_pair(from, to);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto w = from == to ? paths_.cycle_weight(from) : paths_.acyclic_weight(from, to);
    if (!w)
      throw std::logic_error("dependence between statements " + std::to_string(src_stmt) +
                             " and " + std::to_string(dst_stmt) + " has no CFG path");
    cache_.emplace(key, *w);
    return *w;
  }

 private:
  const backedge_paths& paths_;
  direction dir_;
  std::map<std::pair<node_id, node_id>, std::uint32_t> cache_;
};

}  // namespace detail

inline entity_dependence_graph build_edg(const program& p, analysis_kind kind,
                                         search_limits limits = {}) {
  const control_flow_graph cfg(p);
  const backedge_paths paths(cfg, limits);
  entity_dependence_graph g;
  g.kind = kind;
  const solve_options quiet{default_pass_convention, false};

  switch (kind) {
    case analysis_kind::constant_propagation: {
      g.dir = direction::forward;
      detail::edg_weigher weight(paths, g.dir);
      const auto defs = definition_instances(p);
      for (const auto& d : defs) {
        const auto& s = p.nodes.at(d.stmt);
        const bool independent = std::holds_alternative<const_assign>(s) ||
                                 std::holds_alternative<read_assign>(s) ||
                                 rhs_variables(s).empty();
        g.add_node({d.variable, d.stmt, independent});
      }
      const auto reach = round_robin_solve(make_bitvector_framework(p, analysis_kind::reaching_definitions),
                                           cfg, quiet);
      for (const auto& [j, s] : p.nodes) {
        const auto target = defined_variable(s);
        if (!target) continue;
        const std::size_t beta = *g.find(*target, j);
        for (const auto& alpha : rhs_variables(s)) {
          for (std::size_t k = 0; k < defs.size(); ++k) {
            if (defs[k].variable != alpha) continue;
            if (reach.in.at(j)[k] != two_point::bottom) continue;
            g.add_edge(*g.find(alpha, defs[k].stmt), beta, weight(defs[k].stmt, j));
          }
        }
      }
      break;
    }
    case analysis_kind::faint_variables: {
      g.dir = direction::backward;
      detail::edg_weigher weight(paths, g.dir);
      const auto uses = use_instances(p);
      for (const auto& u : uses)
        g.add_node({u.variable, u.stmt, std::holds_alternative<print_stmt>(p.nodes.at(u.stmt))});
      const auto live = round_robin_solve(make_bitvector_framework(p, analysis_kind::live_variables),
                                          cfg, quiet);
      for (const auto& [s_id, s] : p.nodes) {
        const auto target = defined_variable(s);
        const auto rhs = rhs_variables(s);
        if (!target || rhs.empty()) continue;
        for (std::size_t k = 0; k < uses.size(); ++k) {
          if (uses[k].variable != *target) continue;
          if (live.out.at(s_id)[k] != two_point::bottom) continue;
          const std::size_t src = *g.find(*target, uses[k].stmt);
          for (const auto& b : rhs) g.add_edge(src, *g.find(b, s_id), weight(uses[k].stmt, s_id));
        }
      }
      break;
    }
    case analysis_kind::available_expressions: {
      g.dir = direction::forward;
      const auto exprs = expression_entities(p);
      for (const auto& [id, s] : p.nodes)
        if (auto t = defined_variable(s))
          for (const auto& e : exprs)
            if (e.uses(*t)) g.add_node({"(" + e.name() + ")", id, true});
      break;
    }
    case analysis_kind::reaching_definitions:
      g.dir = direction::forward;
      for (const auto& d : definition_instances(p)) g.add_node({d.variable, d.stmt, true});
      break;
    case analysis_kind::live_variables:
      g.dir = direction::backward;
      for (const auto& u : use_instances(p)) g.add_node({u.variable, u.stmt, true});
      break;
  }
  return g;
}

template <component_lattice L>
entity_dependence_graph build_edg(const program& p, const framework_instance<L>& fw,
                                  search_limits limits = {}) {
  return build_edg(p, fw.kind, limits);
}

struct entry_set {
  std::vector<std::size_t> nodes;
  std::optional<std::string> diagnostic;
};

// In-degree-0 nodes whose flow function can produce a non-top value on its own.
inline entry_set entry_nodes(const entity_dependence_graph& g) {
  entry_set out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.in_degree(i) == 0 && g.nodes()[i].independent) out.nodes.push_back(i);
  if (out.nodes.empty())
    out.diagnostic =
        "no entity can change from top independently; data flow analysis need not be performed";
  return out;
}

class malformed_path : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Spine with designated simple cycles attached at spine positions. Each
// cycle lists its nodes starting at the attachment; the closing edge back to
// nodes[0] is implied.
struct structured_path {
  struct cycle {
    std::size_t position = 0;
    std::vector<std::size_t> nodes;
  };
  std::vector<std::size_t> spine;
  std::vector<cycle> cycles;
};

// Delta of one explicit path structure. The spine after the last cycle may
// run along that cycle (the target lies on it); that stretch is covered by
// the cycle's circuits and costs nothing.
inline std::uint64_t path_delta(const entity_dependence_graph& g, const structured_path& path,
                                std::uint32_t component_height, bool monotonic) {
  if (path.spine.empty()) throw malformed_path("empty spine");
  auto weight = [&](std::size_t a, std::size_t b) -> std::uint64_t {
    auto e = g.edge_between(a, b);
    if (!e)
      throw malformed_path("no EDG edge " + g.nodes().at(a).name() + " -> " +
                           g.nodes().at(b).name());
    return e->weight;
  };
  std::set<std::size_t> spine_nodes(path.spine.begin(), path.spine.end());
  if (spine_nodes.size() != path.spine.size()) throw malformed_path("spine repeats a node");

  std::set<std::size_t> used_by_cycles;
  std::vector<std::uint64_t> cycle_weights;
  std::size_t charged_until = path.spine.size() - 1;  // spine edges [0, charged_until)
  for (std::size_t c = 0; c < path.cycles.size(); ++c) {
    const auto& cyc = path.cycles[c];
    if (cyc.nodes.empty() || cyc.position >= path.spine.size() ||
        cyc.nodes.front() != path.spine[cyc.position])
      throw malformed_path("cycle not attached to the spine");
    if (c > 0 && cyc.position <= path.cycles[c - 1].position)
      throw malformed_path("cycles out of spine order");
    std::uint64_t w = 0;
    for (std::size_t k = 0; k < cyc.nodes.size(); ++k) {
      if (!used_by_cycles.insert(cyc.nodes[k]).second)
        throw malformed_path("overlapping cycles; pass the heaviest one");
      w += weight(cyc.nodes[k], cyc.nodes[(k + 1) % cyc.nodes.size()]);
    }
    cycle_weights.push_back(w);

    const bool last = c + 1 == path.cycles.size();
    std::size_t along = 0;  // spine nodes after the attachment that follow the cycle
    if (last) {
      while (cyc.position + along + 1 < path.spine.size() && along + 1 < cyc.nodes.size() &&
             path.spine[cyc.position + along + 1] == cyc.nodes[along + 1])
        ++along;
      if (cyc.position + along + 1 == path.spine.size()) charged_until = cyc.position;
      else along = 0;
    }
    for (std::size_t k = 1; k < cyc.nodes.size(); ++k) {
      if (k <= along) continue;
      if (spine_nodes.count(cyc.nodes[k]))
        throw malformed_path("cycle re-enters the spine");
    }
  }

  std::uint64_t total = 0;
  for (std::size_t k = 0; k < charged_until; ++k) total += weight(path.spine[k], path.spine[k + 1]);
  if (!cycle_weights.empty()) {
    if (monotonic) {
      total += std::uint64_t{component_height} *
               *std::max_element(cycle_weights.begin(), cycle_weights.end());
    } else {
      for (auto w : cycle_weights) total += std::uint64_t{component_height} * w;
    }
  }
  return total;
}

struct delta_limits {
  std::uint64_t max_steps = 1'000'000;
};

// Strongly connected components with the heaviest simple cycle of each.
class edg_components {
 public:
  edg_components(const entity_dependence_graph& g, delta_limits limits = {}) : g_(g) {
    tarjan();
    heaviest_.assign(components_.size(), std::nullopt);
    for (std::size_t c = 0; c < components_.size(); ++c) heaviest_[c] = heaviest_cycle(c, limits);
  }

  std::size_t count() const noexcept { return components_.size(); }
  std::size_t component_of(std::size_t node) const { return comp_[node]; }
  const std::vector<std::size_t>& members(std::size_t c) const { return components_[c]; }
  // Components are numbered in reverse topological order (sinks first).
  bool cyclic(std::size_t c) const { return heaviest_[c].has_value(); }
  std::uint32_t heaviest_cycle(std::size_t c) const { return heaviest_[c].value_or(0); }

 private:
  void tarjan() {
    const std::size_t n = g_.size();
    comp_.assign(n, SIZE_MAX);
    std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    struct frame {
      std::size_t node;
      std::size_t next;
    };
    for (std::size_t root = 0; root < n; ++root) {
      if (index[root] != SIZE_MAX) continue;
      std::vector<frame> call{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!call.empty()) {
        frame& f = call.back();
        const auto& outs = g_.out_edges(f.node);
        if (f.next < outs.size()) {
          const std::size_t w = g_.edges()[outs[f.next++]].dst;
          if (index[w] == SIZE_MAX) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            call.push_back({w, 0});
          } else if (on_stack[w]) {
            low[f.node] = std::min(low[f.node], index[w]);
          }
          continue;
        }
        const std::size_t v = f.node;
        call.pop_back();
        if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
        if (low[v] == index[v]) {
          std::vector<std::size_t> members;
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp_[w] = components_.size();
            members.push_back(w);
          } while (w != v);
          std::sort(members.begin(), members.end());
          components_.push_back(std::move(members));
        }
      }
    }
  }

  // Enumerates simple cycles by their smallest member.
  std::optional<std::uint32_t> heaviest_cycle(std::size_t c, delta_limits limits) const {
    const auto& members = components_[c];
    std::map<std::size_t, std::uint32_t> max_out;
    for (std::size_t v : members) {
      std::uint32_t m = 0;
      for (std::size_t e : g_.out_edges(v))
        if (comp_[g_.edges()[e].dst] == c) m = std::max(m, g_.edges()[e].weight);
      max_out[v] = m;
    }
    std::optional<std::uint32_t> best;
    std::uint64_t steps = 0;
    std::vector<bool> visited(g_.size(), false);

    for (std::size_t start : members) {
      std::uint64_t remaining = 0;  // max_out over nodes still usable
      for (std::size_t v : members)
        if (v > start) remaining += max_out[v];
      std::function<void(std::size_t, std::uint64_t)> dfs = [&](std::size_t v, std::uint64_t cur) {
        if (++steps > limits.max_steps)
          throw search_budget_exceeded("EDG cycle enumeration exceeded " +
                                       std::to_string(limits.max_steps) + " steps");
        if (best && cur + max_out[v] + remaining <= *best) return;
        for (std::size_t e : g_.out_edges(v)) {
          const auto& ed = g_.edges()[e];
          if (comp_[ed.dst] != c) continue;
          if (ed.dst == start) {
            const auto w = static_cast<std::uint32_t>(cur + ed.weight);
            if (!best || w > *best) best = w;
            continue;
          }
          if (ed.dst < start || visited[ed.dst]) continue;
          visited[ed.dst] = true;
          remaining -= max_out[ed.dst];
          dfs(ed.dst, cur + ed.weight);
          remaining += max_out[ed.dst];
          visited[ed.dst] = false;
        }
      };
      visited[start] = true;
      dfs(start, 0);
      visited[start] = false;
    }
    return best;
  }

  const entity_dependence_graph& g_;
  std::vector<std::size_t> comp_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::optional<std::uint32_t>> heaviest_;
};

// Max Delta(source -> beta) for every node beta; nullopt when unreachable.
inline std::vector<std::optional<std::uint64_t>> delta_profile(const entity_dependence_graph& g,
                                                               const edg_components& comps,
                                                               std::size_t source,
                                                               std::uint32_t component_height,
                                                               bool monotonic) {
  const std::size_t nc = comps.count();
  // Per component: best charged edge sum for each heaviest-cycle value seen
  // (monotonic), or best total under key 0 (non-monotonic).
  std::vector<std::map<std::uint32_t, std::uint64_t>> states(nc);
  auto offer = [](std::map<std::uint32_t, std::uint64_t>& s, std::uint32_t m, std::uint64_t sum) {
    auto it = s.find(m);
    if (it == s.end() || it->second < sum) s[m] = sum;
  };
  auto enter = [&](std::size_t c, std::uint32_t m, std::uint64_t sum) {
    if (monotonic) offer(states[c], std::max(m, comps.heaviest_cycle(c)), sum);
    else offer(states[c], 0, sum + std::uint64_t{component_height} * comps.heaviest_cycle(c));
  };
  enter(comps.component_of(source), 0, 0);

  // Reverse topological numbering: walk from high to low.
  for (std::size_t c = nc; c-- > 0;) {
    if (states[c].empty()) continue;
    for (std::size_t v : comps.members(c)) {
      for (std::size_t e : g.out_edges(v)) {
        const auto& ed = g.edges()[e];
        const std::size_t d = comps.component_of(ed.dst);
        if (d == c) continue;
        for (const auto& [m, sum] : states[c]) enter(d, m, sum + ed.weight);
      }
    }
  }

  std::vector<std::optional<std::uint64_t>> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& s = states[comps.component_of(v)];
    for (const auto& [m, sum] : s) {
      const std::uint64_t value = monotonic ? sum + std::uint64_t{component_height} * m : sum;
      if (!out[v] || value > *out[v]) out[v] = value;
    }
  }
  // Delta(a0 -> a0) for an entry node is 0 (no cycle passes through it).
  if (!comps.cyclic(comps.component_of(source))) out[source] = 0;
  return out;
}

struct dependence_degree {
  std::uint64_t delta = 0;
  entry_set entries;
};

inline dependence_degree degree_of_dependence(const entity_dependence_graph& g,
                                              std::uint32_t component_height, bool monotonic,
                                              delta_limits limits = {}) {
  dependence_degree out;
  out.entries = entry_nodes(g);
  if (g.edges().empty()) return out;
  const edg_components comps(g, limits);
  for (std::size_t a0 : out.entries.nodes)
    for (const auto& d : delta_profile(g, comps, a0, component_height, monotonic))
      if (d) out.delta = std::max(out.delta, *d);
  return out;
}

struct dependence_audit {
  std::size_t checked = 0;  // traced transitions along an EDG edge
  std::size_t violations = 0;
};

// Checks ht(u) >= ht(v) for every traced value computation a_i^v -> b_j^u
// that corresponds to an EDG edge.
template <component_lattice L>
dependence_audit audit_entity_dependence(const entity_dependence_graph& g,
                                         const std::vector<std::string>& entity_names,
                                         const std::vector<trace_record<typename L::value_type>>& trace) {
  const program_point computed =
      g.dir == direction::forward ? program_point::out : program_point::in;
  std::set<std::pair<std::string, std::size_t>> sources_of;  // (source entity, target node)
  for (const auto& e : g.edges()) sources_of.insert({g.nodes()[e.src].entity, e.dst});

  dependence_audit out;
  for (const auto& rec : trace) {
    if (rec.point != computed || rec.operands.empty()) continue;
    const auto beta = g.find(entity_names.at(rec.entity), rec.node);
    if (!beta) continue;
    for (const auto& op : rec.operands) {
      if (!sources_of.count({entity_names.at(op.entity), *beta})) continue;
      ++out.checked;
      if (L::height(rec.new_value) < L::height(op.value)) ++out.violations;
    }
  }
  return out;
}

template <component_lattice L>
std::size_t count_entity_dependence_violations(const entity_dependence_graph& g,
                                               const std::vector<std::string>& entity_names,
                                               const std::vector<trace_record<typename L::value_type>>& trace) {
  return audit_entity_dependence<L>(g, entity_names, trace).violations;
}

template <component_lattice L>
bool check_monotonic_entity_dependence(const entity_dependence_graph& g,
                                       const std::vector<std::string>& entity_names,
                                       const std::vector<trace_record<typename L::value_type>>& trace) {
  return count_entity_dependence_violations<L>(g, entity_names, trace) == 0;
}

// One "src dst weight" line per edge.
inline std::string export_edg(const entity_dependence_graph& g) {
  std::ostringstream os;
  for (const auto& e : g.edges())
    os << g.nodes()[e.src].name() << " " << g.nodes()[e.dst].name() << " " << e.weight << "\n";
  return os.str();
}

}  // namespace dfbound
