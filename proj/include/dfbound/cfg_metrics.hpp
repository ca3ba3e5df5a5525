#pragma once

// Back edges, CFG depth d and max-back-edge weights of node-simple paths.
//
// Back edges come from a DFS rooted at the entry that visits successors in
// ascending id order; an edge is a back edge when its target is on the DFS
// stack. Path searches are exact backtracking over node-simple paths, pruned
// by an upper bound on the back edges still usable from the current node.

#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfbound/cfg.hpp"

namespace dfbound {

struct search_limits {
  std::size_t max_nodes = 64;  // at most 64; searches use 64-bit node masks
  std::uint64_t max_steps = 200'000'000;
};

class search_budget_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::set<edge> classify_back_edges(const control_flow_graph& cfg) {
  std::set<edge> back;
  const std::size_t n = cfg.size();
  enum class mark : unsigned char { unvisited, on_stack, done };
  std::vector<mark> state(n, mark::unvisited);
  struct frame {
    std::size_t node;
    std::size_t next_succ;
  };
  std::vector<frame> stack;
  const std::size_t root = cfg.index_of(cfg.entry());
  stack.push_back({root, 0});
  state[root] = mark::on_stack;
  while (!stack.empty()) {
    frame& top = stack.back();
    const node_id from = cfg.id_at(top.node);
    const auto& succ = cfg.successors(from);
    if (top.next_succ == succ.size()) {
      state[top.node] = mark::done;
      stack.pop_back();
      continue;
    }
    const node_id to = succ[top.next_succ++];
    const std::size_t ti = cfg.index_of(to);
    if (state[ti] == mark::on_stack) {
      back.insert({from, to});
    } else if (state[ti] == mark::unvisited) {
      state[ti] = mark::on_stack;
      stack.push_back({ti, 0});
    }
  }
  return back;
}

inline std::vector<node_id> traversal_order(const control_flow_graph& cfg, direction dir) {
  std::vector<node_id> order = cfg.nodes();
  if (dir == direction::backward) std::reverse(order.begin(), order.end());
  return order;
}

class backedge_paths {
 public:
  explicit backedge_paths(const control_flow_graph& cfg, search_limits limits = {})
      : cfg_(&cfg), limits_(limits), back_edges_(classify_back_edges(cfg)) {
    n_ = cfg.size();
    if (limits_.max_nodes > 64) limits_.max_nodes = 64;
    if (n_ > limits_.max_nodes)
      throw search_budget_exceeded("CFG has " + std::to_string(n_) +
                                   " nodes, path search cap is " +
                                   std::to_string(limits_.max_nodes));
    succ_.assign(n_, 0);
    back_.assign(n_, 0);
    order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const node_id from = cfg.id_at(i);
      std::vector<std::size_t> forward;
      for (node_id to : cfg.successors(from)) {
        const std::size_t j = cfg.index_of(to);
        succ_[i] |= bit(j);
        if (back_edges_.count({from, to})) {
          back_[i] |= bit(j);
          order_[i].push_back(j);
        } else {
          forward.push_back(j);
        }
      }
      order_[i].insert(order_[i].end(), forward.begin(), forward.end());
    }
  }

  const std::set<edge>& back_edges() const noexcept { return back_edges_; }
  const control_flow_graph& cfg() const noexcept { return *cfg_; }

  // Maximum number of back edges on any node-simple path.
  std::uint32_t depth() const {
    const auto total = static_cast<std::uint32_t>(back_edges_.size());
    search s(*this, -1, false);
    for (std::size_t start = 0; start < n_ && !(s.found && s.best == total); ++start)
      s.run(start, bit(start), 0);
    return s.best;
  }

  // Maximum back-edge count over node-simple paths from -> to; the empty
  // path gives 0 when from == to. nullopt when `to` is unreachable.
  std::optional<std::uint32_t> acyclic_weight(node_id from, node_id to) const {
    const std::size_t f = cfg_->index_of(from);
    const std::size_t t = cfg_->index_of(to);
    if (f == t) return 0;
    search s(*this, static_cast<int>(t), false);
    s.run(f, bit(f), 0);
    if (!s.found) return std::nullopt;
    return s.best;
  }

  // Maximum back-edge count over simple cycles through `node`; nullopt when
  // the node lies on no cycle.
  std::optional<std::uint32_t> cycle_weight(node_id node) const {
    const std::size_t f = cfg_->index_of(node);
    search s(*this, static_cast<int>(f), true);
    s.run(f, bit(f), 0);
    if (!s.found) return std::nullopt;
    return s.best;
  }

 private:
  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

  struct search {
    search(const backedge_paths& g, int target, bool closing)
        : g(g), target(target), closing(closing) {}

    const backedge_paths& g;
    int target;    // -1: every node ends a path
    bool closing;  // target is the start node; an edge into it closes a cycle
    std::uint64_t steps = 0;
    std::uint32_t best = 0;
    bool found = false;

    void record(std::uint32_t value) {
      if (!found || value > best) best = value;
      found = true;
    }

    std::uint64_t reach_from(std::size_t v, std::uint64_t visited) const {
      std::uint64_t reach = bit(v);
      std::uint64_t frontier = reach;
      while (frontier) {
        const auto u = static_cast<std::size_t>(std::countr_zero(frontier));
        frontier &= frontier - 1;
        const std::uint64_t next = g.succ_[u] & ~visited & ~reach;
        reach |= next;
        frontier |= next;
      }
      return reach;
    }

    void run(std::size_t v, std::uint64_t visited, std::uint32_t cur) {
      if (++steps > g.limits_.max_steps)
        throw search_budget_exceeded("path search exceeded " +
                                     std::to_string(g.limits_.max_steps) + " steps");
      if (target < 0) {
        record(cur);
      } else if (!closing && v == static_cast<std::size_t>(target)) {
        record(cur);
        return;
      }

      const std::uint64_t reach = reach_from(v, visited);
      const std::uint64_t target_bit = target >= 0 ? bit(static_cast<std::size_t>(target)) : 0;
      const std::uint64_t open = ~visited | (closing ? target_bit : 0);
      bool can_finish = target < 0;
      std::uint32_t bound = cur;
      for (std::uint64_t r = reach; r; r &= r - 1) {
        const auto u = static_cast<std::size_t>(std::countr_zero(r));
        bound += static_cast<std::uint32_t>(std::popcount(g.back_[u] & open));
        if (closing && (g.succ_[u] & target_bit)) can_finish = true;
      }
      if (target >= 0 && !closing && (reach & target_bit)) can_finish = true;
      if (!can_finish) return;
      if (found && bound <= best) return;

      for (std::size_t w : g.order_[v]) {
        const std::uint32_t step = (g.back_[v] & bit(w)) ? 1u : 0u;
        if (closing && static_cast<int>(w) == target) {
          record(cur + step);
          continue;
        }
        if (visited & bit(w)) continue;
        run(w, visited | bit(w), cur + step);
      }
    }
  };

  const control_flow_graph* cfg_;
  search_limits limits_;
  std::set<edge> back_edges_;
  std::size_t n_ = 0;
  std::vector<std::uint64_t> succ_;
  std::vector<std::uint64_t> back_;
  std::vector<std::vector<std::size_t>> order_;  // back-edge successors first
};

struct cfg_metrics {
  std::set<edge> back_edges;
  std::uint32_t depth = 0;
};

inline cfg_metrics compute_metrics(const control_flow_graph& cfg, search_limits limits = {}) {
  backedge_paths paths(cfg, limits);
  return {paths.back_edges(), paths.depth()};
}

inline std::uint32_t depth(const control_flow_graph& cfg, search_limits limits = {}) {
  return backedge_paths(cfg, limits).depth();
}

inline std::optional<std::uint32_t> max_backedge_acyclic_weight(const control_flow_graph& cfg,
                                                                node_id from, node_id to,
                                                                search_limits limits = {}) {
  return backedge_paths(cfg, limits).acyclic_weight(from, to);
}

}  // namespace dfbound
