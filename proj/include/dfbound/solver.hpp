#pragma once

// Round-robin and worklist solvers for unidirectional monotone frameworks.
// Every program point starts at top; the entry (forward) or the exits
// (backward) additionally meet with the framework boundary value.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfbound/cfg_metrics.hpp"
#include "dfbound/framework.hpp"

namespace dfbound {

enum class program_point : std::uint8_t { in, out };

template <class V>
struct trace_record {
  std::uint32_t pass = 0;
  node_id node = 0;
  program_point point = program_point::in;
  std::size_t entity = 0;
  V old_value{};
  V new_value{};
  std::vector<operand_value<V>> operands;
};

// Whether the final pass, which changes nothing, is counted in I.
enum class pass_convention { exclude_final, include_final };

#ifdef DFBOUND_INCLUDE_FINAL_PASS
inline constexpr pass_convention default_pass_convention = pass_convention::include_final;
#else
inline constexpr pass_convention default_pass_convention = pass_convention::exclude_final;
#endif

inline std::uint32_t iterations_from_passes(std::uint32_t passes, pass_convention c) {
  if (c == pass_convention::include_final) return passes;
  return passes > 1 ? passes - 1 : 1;
}

struct solve_options {
  pass_convention convention = default_pass_convention;
  bool record_trace = true;
};

template <component_lattice L>
struct solve_result {
  using product = product_value<L>;
  std::map<node_id, product> in;
  std::map<node_id, product> out;
  std::uint32_t passes = 0;      // round robin: full passes incl. the final one
  std::uint32_t iterations = 0;  // I under the selected convention
  std::uint64_t node_visits = 0;
  std::vector<trace_record<typename L::value_type>> trace;
};

class non_termination_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <component_lattice L>
struct solver_core {
  using product = product_value<L>;

  const framework_instance<L>& fw;
  const control_flow_graph& cfg;
  solve_result<L>& result;
  bool record_trace;

  bool forward() const { return fw.dir == direction::forward; }

  // Side of a node that is a meet over neighbours, and the side computed by
  // the transfer function.
  std::map<node_id, product>& meet_side() { return forward() ? result.in : result.out; }
  std::map<node_id, product>& computed_side() { return forward() ? result.out : result.in; }
  program_point meet_point() const { return forward() ? program_point::in : program_point::out; }
  program_point computed_point() const {
    return forward() ? program_point::out : program_point::in;
  }

  void initialize() {
    for (node_id n : cfg.nodes()) {
      result.in.emplace(n, fw.top());
      result.out.emplace(n, fw.top());
    }
  }

  product gather(node_id n) {
    product acc = fw.top();
    const bool boundary = forward() ? n == cfg.entry() : cfg.is_exit(n);
    if (boundary) acc = meet_product(acc, fw.boundary);
    const auto& neighbours = forward() ? cfg.predecessors(n) : cfg.successors(n);
    for (node_id m : neighbours) acc = meet_product(acc, computed_side().at(m));
    return acc;
  }

  void log_changes(std::uint32_t pass, node_id n, program_point pt, const product& before,
                   const product& after, const operand_log<L>* ops) {
    for (std::size_t e = 0; e < after.size(); ++e) {
      if (before[e] == after[e]) continue;
      trace_record<typename L::value_type> rec;
      rec.pass = pass;
      rec.node = n;
      rec.point = pt;
      rec.entity = e;
      rec.old_value = before[e];
      rec.new_value = after[e];
      if (ops) rec.operands = (*ops)[e];
      result.trace.push_back(std::move(rec));
    }
  }

  // Recomputes both sides of n; returns whether anything changed.
  bool visit(node_id n, std::uint32_t pass) {
    ++result.node_visits;
    product gathered = gather(n);
    product& meet_val = meet_side().at(n);
    bool changed = false;
    if (!(gathered == meet_val)) {
      if (record_trace) log_changes(pass, n, meet_point(), meet_val, gathered, nullptr);
      meet_val = std::move(gathered);
      changed = true;
    }
    operand_log<L> ops;
    if (record_trace) ops.resize(fw.entity_count());
    product computed = fw.apply(n, meet_val, record_trace ? &ops : nullptr);
    if (computed.size() != fw.entity_count())
      throw entity_mismatch("transfer function at node " + std::to_string(n) +
                            " returned a value of the wrong arity");
    product& comp_val = computed_side().at(n);
    if (!(computed == comp_val)) {
      if (record_trace) log_changes(pass, n, computed_point(), comp_val, computed, &ops);
      comp_val = std::move(computed);
      changed = true;
    }
    return changed;
  }
};

}  // namespace detail

template <component_lattice L>
solve_result<L> round_robin_solve(const framework_instance<L>& fw, const control_flow_graph& cfg,
                                  solve_options options = {}) {
  solve_result<L> result;
  detail::solver_core<L> core{fw, cfg, result, options.record_trace};
  core.initialize();
  const auto order = traversal_order(cfg, fw.dir);
  const std::uint64_t guard = 2 + fw.height() * cfg.size();
  while (true) {
    ++result.passes;
    if (result.passes > guard)
      throw non_termination_error("round robin exceeded " + std::to_string(guard) +
                                  " passes; a transfer function is not monotone");
    bool changed = false;
    for (node_id n : order) changed = core.visit(n, result.passes) || changed;
    if (!changed) break;
  }
  result.iterations = iterations_from_passes(result.passes, options.convention);
  return result;
}

// FIFO worklist seeded with every node in traversal order. `iterations`
// holds the node-visit count.
template <component_lattice L>
solve_result<L> worklist_solve(const framework_instance<L>& fw, const control_flow_graph& cfg,
                               solve_options options = {}) {
  solve_result<L> result;
  detail::solver_core<L> core{fw, cfg, result, options.record_trace};
  core.initialize();
  std::deque<node_id> queue;
  std::map<node_id, bool> queued;
  for (node_id n : traversal_order(cfg, fw.dir)) {
    queue.push_back(n);
    queued[n] = true;
  }
  const std::uint64_t guard = (2 + fw.height() * cfg.size()) * std::max<std::size_t>(cfg.size(), 1);
  while (!queue.empty()) {
    const node_id n = queue.front();
    queue.pop_front();
    queued[n] = false;
    if (result.node_visits >= guard)
      throw non_termination_error("worklist exceeded " + std::to_string(guard) +
                                  " node visits; a transfer function is not monotone");
    const auto before = core.computed_side().at(n);
    core.visit(n, 0);
    if (core.computed_side().at(n) == before) continue;
    const auto& dependents = core.forward() ? cfg.successors(n) : cfg.predecessors(n);
    for (node_id m : dependents) {
      if (!queued[m]) {
        queue.push_back(m);
        queued[m] = true;
      }
    }
  }
  result.iterations = static_cast<std::uint32_t>(result.node_visits);
  return result;
}

// Samples pairs x below y and checks f(x) below f(y) at every node.
template <component_lattice L>
bool check_monotonicity(const framework_instance<L>& fw, std::size_t sample_count,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t xi = fw.entity_count();
  for (node_id n : fw.nodes) {
    for (std::size_t i = 0; i < sample_count; ++i) {
      const auto y = sample_product<L>(xi, rng);
      const auto x = meet_product(y, sample_product<L>(xi, rng));
      if (!less_equal(fw.apply(n, x), fw.apply(n, y))) return false;
    }
  }
  return true;
}

}  // namespace dfbound
