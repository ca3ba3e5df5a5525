#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfbound/ir.hpp"

namespace dfbound {

class invalid_program : public std::runtime_error {
 public:
  explicit invalid_program(std::vector<diagnostic> diags)
      : std::runtime_error(describe(diags)), diagnostics_(std::move(diags)) {}

  const std::vector<diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string describe(const std::vector<diagnostic>& diags) {
    std::string msg = "invalid program:";
    for (const auto& d : diags) msg += " " + d.to_string();
    return msg;
  }
  std::vector<diagnostic> diagnostics_;
};

enum class direction { forward, backward };

// Immutable graph view of a validated program. Nodes are kept in ascending
// id order and also addressable by a dense index in that order.
class control_flow_graph {
 public:
  explicit control_flow_graph(const program& p) {
    if (auto diags = validate_program(p); !diags.empty()) throw invalid_program(std::move(diags));
    for (const auto& [id, s] : p.nodes) {
      index_.emplace(id, nodes_.size());
      nodes_.push_back(id);
    }
    succ_.resize(nodes_.size());
    pred_.resize(nodes_.size());
    for (const auto& e : p.edges) {
      succ_[index_.at(e.from)].push_back(e.to);
      pred_[index_.at(e.to)].push_back(e.from);
    }
    for (auto& s : succ_) std::sort(s.begin(), s.end());
    for (auto& s : pred_) std::sort(s.begin(), s.end());
    entry_ = p.entry;
    exits_ = p.exits;
  }

  const std::vector<node_id>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  node_id entry() const noexcept { return entry_; }
  const std::set<node_id>& exits() const noexcept { return exits_; }
  bool is_exit(node_id n) const { return exits_.count(n) != 0; }
  bool contains(node_id n) const { return index_.count(n) != 0; }

  std::size_t index_of(node_id n) const {
    auto it = index_.find(n);
    if (it == index_.end()) throw std::out_of_range("no CFG node " + std::to_string(n));
    return it->second;
  }
  node_id id_at(std::size_t i) const { return nodes_.at(i); }

  const std::vector<node_id>& successors(node_id n) const { return succ_[index_of(n)]; }
  const std::vector<node_id>& predecessors(node_id n) const { return pred_[index_of(n)]; }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& s : succ_) total += s.size();
    return total;
  }

 private:
  std::vector<node_id> nodes_;
  std::map<node_id, std::size_t> index_;
  std::vector<std::vector<node_id>> succ_;
  std::vector<std::vector<node_id>> pred_;
  node_id entry_ = 0;
  std::set<node_id> exits_;
};

inline control_flow_graph build_cfg(const program& p) { return control_flow_graph(p); }

}  // namespace dfbound
