#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfbound/cfg.hpp"
#include "dfbound/lattice.hpp"

namespace dfbound {

enum class analysis_kind {
  constant_propagation,
  faint_variables,
  available_expressions,
  reaching_definitions,
  live_variables,
};

inline constexpr analysis_kind all_analysis_kinds[] = {
    analysis_kind::constant_propagation, analysis_kind::faint_variables,
    analysis_kind::available_expressions, analysis_kind::reaching_definitions,
    analysis_kind::live_variables};

inline std::string_view to_string(analysis_kind k) {
  switch (k) {
    case analysis_kind::constant_propagation: return "cp";
    case analysis_kind::faint_variables: return "faint";
    case analysis_kind::available_expressions: return "avail";
    case analysis_kind::reaching_definitions: return "reach";
    case analysis_kind::live_variables: return "live";
  }
  return "?";
}

inline std::optional<analysis_kind> parse_analysis_kind(std::string_view s) {
  for (analysis_kind k : all_analysis_kinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline bool is_bit_vector(analysis_kind k) {
  return k == analysis_kind::available_expressions || k == analysis_kind::reaching_definitions ||
         k == analysis_kind::live_variables;
}

// The value of another entity that determined a computed component.
template <class V>
struct operand_value {
  std::size_t entity;
  V value;
};

// Per computed entity, the operand values the transfer function consumed.
template <component_lattice L>
using operand_log = std::vector<std::vector<operand_value<typename L::value_type>>>;

// A data flow framework instantiated on one program.
template <component_lattice L>
struct framework_instance {
  using lattice_type = L;
  using value_type = typename L::value_type;
  using product = product_value<L>;
  using transfer_fn = std::function<product(node_id, const product&, operand_log<L>*)>;

  analysis_kind kind = analysis_kind::constant_propagation;
  direction dir = direction::forward;
  std::vector<std::string> entities;
  std::vector<node_id> nodes;
  transfer_fn transfer;
  std::map<node_id, std::vector<std::size_t>> dfpmod;
  std::map<node_id, std::vector<std::size_t>> dfpuse;
  product boundary;
  bool monotonic_entity_dependence = false;

  std::size_t entity_count() const noexcept { return entities.size(); }
  std::uint32_t component_height() const noexcept { return L::max_height; }
  std::uint64_t height() const noexcept {
    return product_height(L::max_height, entities.size());
  }
  product top() const { return product::top(entities.size()); }

  product apply(node_id n, const product& x, operand_log<L>* log = nullptr) const {
    return transfer(n, x, log);
  }

  // Every dfpmod/dfpuse entry names a declared entity.
  bool entity_sets_valid() const {
    for (const auto* sets : {&dfpmod, &dfpuse})
      for (const auto& [n, ids] : *sets)
        for (std::size_t e : ids)
          if (e >= entities.size()) return false;
    return boundary.size() == entities.size();
  }
};

}  // namespace dfbound
