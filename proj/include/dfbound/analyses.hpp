#pragma once

// Constant propagation, faint variables and three bit-vector analyses
// (available expressions, reaching definitions and live variables, the last
// two over renamed definitions / uses).

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dfbound/framework.hpp"
#include "dfbound/ir.hpp"

namespace dfbound {

class variable_index {
 public:
  explicit variable_index(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(names[i], i);
  }
  std::size_t operator()(const std::string& name) const { return index_.at(name); }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

 private:
  std::map<std::string, std::size_t> index_;
};

// Variable instantiated at a statement: a definition (reaching definitions)
// or a use (live variables).
struct statement_instance {
  std::string variable;
  node_id stmt = 0;
  std::string name() const { return variable + "_" + std::to_string(stmt); }
  bool operator==(const statement_instance&) const = default;
};

inline std::vector<statement_instance> definition_instances(const program& p) {
  std::vector<statement_instance> out;
  for (const auto& [id, s] : p.nodes)
    if (auto v = defined_variable(s)) out.push_back({*v, id});
  return out;
}

inline std::vector<statement_instance> use_instances(const program& p) {
  std::vector<statement_instance> out;
  for (const auto& [id, s] : p.nodes)
    for (const auto& v : used_variables(s)) out.push_back({v, id});
  return out;
}

// Syntactic expression "l op r" with at least one variable operand.
struct expression_key {
  operand left;
  binary_op op = binary_op::add;
  operand right;

  std::string name() const { return to_string(left) + op_symbol(op) + to_string(right); }
  bool uses(const std::string& var) const {
    auto is = [&var](const operand& o) {
      const auto* v = std::get_if<std::string>(&o);
      return v && *v == var;
    };
    return is(left) || is(right);
  }
  bool operator==(const expression_key&) const = default;
};

inline std::optional<expression_key> expression_of(const statement& s) {
  const auto* b = std::get_if<binary_assign>(&s);
  if (!b) return std::nullopt;
  if (!std::holds_alternative<std::string>(b->left) && !std::holds_alternative<std::string>(b->right))
    return std::nullopt;
  return expression_key{b->left, b->op, b->right};
}

inline std::vector<expression_key> expression_entities(const program& p) {
  std::vector<expression_key> out;
  for (const auto& [id, s] : p.nodes)
    if (auto e = expression_of(s); e && std::find(out.begin(), out.end(), *e) == out.end())
      out.push_back(*e);
  return out;
}

// ---------------------------------------------------------------------------
// Constant propagation

using cp_product = product_value<cp_lattice>;

inline cp_product cp_transfer(const statement& s, const cp_product& in, const variable_index& vars,
                              operand_log<cp_lattice>* log = nullptr) {
  cp_product out = in;
  auto note = [&](std::size_t target, std::size_t source) {
    if (log) (*log)[target].push_back({source, in[source]});
  };

  if (const auto* a = std::get_if<const_assign>(&s)) {
    out[vars(a->target)] = cp_value::constant(a->value);
  } else if (const auto* a = std::get_if<read_assign>(&s)) {
    out[vars(a->target)] = cp_value::nonconst();
  } else if (const auto* a = std::get_if<copy_assign>(&s)) {
    const std::size_t t = vars(a->target);
    const std::size_t src = vars(a->source);
    out[t] = in[src];
    note(t, src);
  } else if (const auto* a = std::get_if<binary_assign>(&s)) {
    const std::size_t t = vars(a->target);
    auto value_of = [&](const operand& o) {
      if (const auto* v = std::get_if<std::string>(&o)) return in[vars(*v)];
      return cp_value::constant(std::get<std::int64_t>(o));
    };
    const cp_value l = value_of(a->left);
    const cp_value r = value_of(a->right);
    cp_value result;
    if (l.is_nonconst() || r.is_nonconst()) result = cp_value::nonconst();
    else if (l.is_undef() || r.is_undef()) result = cp_value::undef();
    else result = cp_value::constant(evaluate(a->op, l.constant_value, r.constant_value));
    out[t] = result;
    // Only operands whose value decides the result are recorded.
    for (const operand* o : {&a->left, &a->right}) {
      const auto* v = std::get_if<std::string>(o);
      if (!v) continue;
      const cp_value ov = in[vars(*v)];
      const bool decides = result.is_constant() || (result.is_nonconst() && ov.is_nonconst()) ||
                           (result.is_undef() && ov.is_undef());
      if (decides && !(log && !(*log)[t].empty() && (*log)[t].back().entity == vars(*v)))
        note(t, vars(*v));
    }
  }
  return out;
}

inline framework_instance<cp_lattice> make_constant_propagation(const program& p) {
  framework_instance<cp_lattice> fw;
  fw.kind = analysis_kind::constant_propagation;
  fw.dir = direction::forward;
  fw.entities = p.variables;
  fw.boundary = fw.top();
  fw.monotonic_entity_dependence = true;
  const variable_index vars(p.variables);
  for (const auto& [id, s] : p.nodes) {
    fw.nodes.push_back(id);
    auto& mod = fw.dfpmod[id];
    auto& use = fw.dfpuse[id];
    if (auto t = defined_variable(s)) {
      mod.push_back(vars(*t));
      for (const auto& v : rhs_variables(s)) use.push_back(vars(v));
    }
  }
  auto stmts = std::make_shared<const std::map<node_id, statement>>(p.nodes);
  fw.transfer = [stmts, vars](node_id n, const cp_product& in, operand_log<cp_lattice>* log) {
    return cp_transfer(stmts->at(n), in, vars, log);
  };
  return fw;
}

// ---------------------------------------------------------------------------
// Faint variables: top = faint, bottom = not faint (strongly live).

namespace fv {
inline constexpr two_point faint = two_point::top;
inline constexpr two_point not_faint = two_point::bottom;
}  // namespace fv

using bit_product = product_value<two_point_lattice>;

// Backward: computes the value before the statement from the value after it.
inline bit_product fv_transfer(const statement& s, const bit_product& out_val,
                               const variable_index& vars,
                               operand_log<two_point_lattice>* log = nullptr) {
  bit_product in = out_val;
  if (const auto* pr = std::get_if<print_stmt>(&s)) {
    in[vars(pr->source)] = fv::not_faint;
    return in;
  }
  const auto target = defined_variable(s);
  if (!target) return in;
  const std::size_t t = vars(*target);
  const two_point target_after = out_val[t];
  in[t] = fv::faint;
  if (target_after == fv::not_faint) {
    for (const auto& v : rhs_variables(s)) {
      const std::size_t b = vars(v);
      in[b] = fv::not_faint;
      if (log) (*log)[b].push_back({t, target_after});
    }
  }
  return in;
}

inline framework_instance<two_point_lattice> make_faint_variables(const program& p) {
  framework_instance<two_point_lattice> fw;
  fw.kind = analysis_kind::faint_variables;
  fw.dir = direction::backward;
  fw.entities = p.variables;
  fw.boundary = fw.top();
  fw.monotonic_entity_dependence = true;
  const variable_index vars(p.variables);
  for (const auto& [id, s] : p.nodes) {
    fw.nodes.push_back(id);
    auto& mod = fw.dfpmod[id];
    auto& use = fw.dfpuse[id];
    for (const auto& v : used_variables(s)) mod.push_back(vars(v));
    if (auto t = defined_variable(s); t && !rhs_variables(s).empty()) use.push_back(vars(*t));
  }
  auto stmts = std::make_shared<const std::map<node_id, statement>>(p.nodes);
  fw.transfer = [stmts, vars](node_id n, const bit_product& out_val,
                              operand_log<two_point_lattice>* log) {
    return fv_transfer(stmts->at(n), out_val, vars, log);
  };
  return fw;
}

// ---------------------------------------------------------------------------
// Bit-vector analyses. Every transfer component is a constant function or
// the identity.
//   avail: top = available, bottom = not available (killed)
//   reach: top = definition absent, bottom = definition reaches
//   live:  top = use not live, bottom = use live

inline framework_instance<two_point_lattice> make_bitvector_framework(const program& p,
                                                                      analysis_kind kind) {
  framework_instance<two_point_lattice> fw;
  fw.kind = kind;
  fw.monotonic_entity_dependence = true;
  for (const auto& [id, s] : p.nodes) {
    fw.nodes.push_back(id);
    fw.dfpmod[id];
    fw.dfpuse[id];
  }

  // Per node: components forced to top, then components forced to bottom.
  struct gen_kill {
    std::vector<std::size_t> to_top;
    std::vector<std::size_t> to_bottom;
  };
  auto effects = std::make_shared<std::map<node_id, gen_kill>>();

  switch (kind) {
    case analysis_kind::available_expressions: {
      fw.dir = direction::forward;
      const auto exprs = expression_entities(p);
      for (const auto& e : exprs) fw.entities.push_back(e.name());
      for (const auto& [id, s] : p.nodes) {
        auto& eff = (*effects)[id];
        if (auto e = expression_of(s))
          eff.to_top.push_back(static_cast<std::size_t>(
              std::find(exprs.begin(), exprs.end(), *e) - exprs.begin()));
        if (auto t = defined_variable(s))
          for (std::size_t i = 0; i < exprs.size(); ++i)
            if (exprs[i].uses(*t)) eff.to_bottom.push_back(i);
        fw.dfpmod[id] = eff.to_bottom;
      }
      break;
    }
    case analysis_kind::reaching_definitions: {
      fw.dir = direction::forward;
      const auto defs = definition_instances(p);
      for (const auto& d : defs) fw.entities.push_back(d.name());
      for (const auto& [id, s] : p.nodes) {
        auto& eff = (*effects)[id];
        const auto t = defined_variable(s);
        if (!t) continue;
        for (std::size_t i = 0; i < defs.size(); ++i) {
          if (defs[i].variable != *t) continue;
          if (defs[i].stmt == id) {
            eff.to_bottom.push_back(i);
            fw.dfpmod[id].push_back(i);
          } else {
            eff.to_top.push_back(i);
          }
        }
      }
      break;
    }
    case analysis_kind::live_variables: {
      fw.dir = direction::backward;
      const auto uses = use_instances(p);
      for (const auto& u : uses) fw.entities.push_back(u.name());
      for (const auto& [id, s] : p.nodes) {
        auto& eff = (*effects)[id];
        if (auto t = defined_variable(s))
          for (std::size_t i = 0; i < uses.size(); ++i)
            if (uses[i].variable == *t) eff.to_top.push_back(i);
        for (std::size_t i = 0; i < uses.size(); ++i)
          if (uses[i].stmt == id) {
            eff.to_bottom.push_back(i);
            fw.dfpmod[id].push_back(i);
          }
      }
      break;
    }
    default:
      throw std::invalid_argument("not a bit-vector analysis: " + std::string(to_string(kind)));
  }

  fw.boundary = fw.top();
  fw.transfer = [effects](node_id n, const bit_product& x, operand_log<two_point_lattice>*) {
    bit_product y = x;
    const auto& eff = effects->at(n);
    for (std::size_t i : eff.to_top) y[i] = two_point::top;
    for (std::size_t i : eff.to_bottom) y[i] = two_point::bottom;
    return y;
  };
  return fw;
}

using any_framework =
    std::variant<framework_instance<cp_lattice>, framework_instance<two_point_lattice>>;

inline any_framework make_framework(const program& p, analysis_kind kind) {
  switch (kind) {
    case analysis_kind::constant_propagation: return make_constant_propagation(p);
    case analysis_kind::faint_variables: return make_faint_variables(p);
    default: return make_bitvector_framework(p, kind);
  }
}

}  // namespace dfbound
