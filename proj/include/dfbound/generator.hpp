#pragma once

// Seeded generator of structured programs: statement sequences, if-diamonds
// and while-loops, optionally with extra edges that jump into a loop body
// (which makes the CFG irreducible). Nodes are numbered in layout order, so
// forward edges ascend and loop-closing edges descend.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dfbound/ir.hpp"

namespace dfbound {

struct statement_mix {
  std::uint32_t constant = 3;
  std::uint32_t copy = 2;
  std::uint32_t binop = 5;
  std::uint32_t read = 1;
  std::uint32_t print = 1;
  std::uint32_t skip = 1;
};

struct generator_config {
  std::uint64_t seed = 42;
  std::size_t max_nodes = 60;
  std::size_t min_vars = 4;
  std::size_t max_vars = 8;
  std::size_t max_loop_depth = 3;
  statement_mix mix{};
  double irreducible_probability = 0.0;  // per generated loop
  std::string name_prefix = "gen";
};

namespace detail {

class program_builder {
 public:
  program_builder(const generator_config& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

  program build(std::string name) {
    p_.name = std::move(name);
    const std::size_t lo_vars = std::max<std::size_t>(1, std::min(cfg_.min_vars, cfg_.max_vars));
    const std::size_t nvars = lo_vars + below(cfg_.max_vars - lo_vars + 1);
    for (std::size_t i = 0; i < nvars; ++i) p_.variables.push_back(var_name(i));

    const std::size_t cap = std::max<std::size_t>(cfg_.max_nodes, 2);
    const std::size_t lo = std::max<std::size_t>(2, cap / 3);
    target_ = lo + below(cap - lo + 1);

    emit(random_statement());
    block(0, target_ - 1);
    emit(print_stmt{random_var()});
    p_.entry = 1;
    std::set<node_id> has_succ;
    for (const auto& e : p_.edges) has_succ.insert(e.from);
    for (const auto& [id, s] : p_.nodes)
      if (!has_succ.count(id)) p_.exits.insert(id);
    return std::move(p_);
  }

 private:
  static std::string var_name(std::size_t i) {
    static const char* base[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
    if (i < 8) return base[i];
    return "v" + std::to_string(i);
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  std::string random_var() { return p_.variables[below(p_.variables.size())]; }

  operand random_operand() {
    if (below(10) < 7) return random_var();
    return static_cast<std::int64_t>(below(15)) - 5;
  }

  statement random_statement() {
    const auto& m = cfg_.mix;
    const std::uint64_t total = std::uint64_t{m.constant} + m.copy + m.binop + m.read + m.print + m.skip;
    std::uint64_t r = below(std::max<std::uint64_t>(total, 1));
    if (r < m.constant) return const_assign{random_var(), static_cast<std::int64_t>(below(10))};
    r -= m.constant;
    if (r < m.copy) return copy_assign{random_var(), random_var()};
    r -= m.copy;
    if (r < m.binop) {
      static const binary_op ops[] = {binary_op::add, binary_op::sub, binary_op::mul};
      operand left = random_operand();
      operand right = random_operand();
      if (!std::holds_alternative<std::string>(left) && !std::holds_alternative<std::string>(right))
        left = random_var();
      return binary_assign{random_var(), left, ops[below(3)], right};
    }
    r -= m.binop;
    if (r < m.read) return read_assign{random_var()};
    r -= m.read;
    if (r < m.print) return print_stmt{random_var()};
    return skip_stmt{};
  }

  std::size_t used() const { return p_.nodes.size(); }

  node_id emit(statement s) {
    const node_id id = next_++;
    p_.nodes.emplace(id, std::move(s));
    for (node_id from : pending_) p_.edges.push_back({from, id});
    pending_ = {id};
    return id;
  }

  // Emits nodes until `limit` nodes exist in total (or the block ends early).
  void block(std::size_t depth, std::size_t limit) {
    bool first = true;
    while (used() < limit) {
      const std::size_t room = limit - used();
      if (!first && below(8) == 0) break;
      first = false;
      const std::uint64_t pick = below(10);
      if (room >= 2 && depth < cfg_.max_loop_depth && pick < 3) {
        loop(depth, limit);
      } else if (room >= 3 && pick < 5) {
        diamond(depth, limit);
      } else {
        emit(random_statement());
      }
    }
  }

  void loop(std::size_t depth, std::size_t limit) {
    const std::vector<node_id> before = pending_;
    const node_id header = emit(random_statement());
    const std::size_t room = limit - used();
    const std::size_t body_limit = used() + 1 + below(room);
    const node_id body_first = next_;
    block(depth + 1, std::min(body_limit, limit));
    if (next_ == body_first) emit(random_statement());
    const node_id body_last = next_ - 1;
    for (node_id from : pending_) p_.edges.push_back({from, header});
    pending_ = {header};

    if (!before.empty() && body_last > body_first && chance(cfg_.irreducible_probability)) {
      const node_id from = before[below(before.size())];
      const node_id into = body_first + 1 + static_cast<node_id>(below(body_last - body_first));
      const edge jump{from, into};
      if (std::find(p_.edges.begin(), p_.edges.end(), jump) == p_.edges.end())
        p_.edges.push_back(jump);
    }
  }

  void diamond(std::size_t depth, std::size_t limit) {
    const node_id branch = emit(random_statement());
    const std::size_t room = limit - used();
    const std::size_t then_limit = used() + 1 + below(std::max<std::size_t>(room - 1, 1));
    block(depth, std::min(then_limit, limit));
    std::vector<node_id> joined = pending_;
    pending_ = {branch};
    if (used() < limit && below(2) == 0) {
      block(depth, limit);
      joined.insert(joined.end(), pending_.begin(), pending_.end());
    } else {
      joined.push_back(branch);
    }
    std::sort(joined.begin(), joined.end());
    joined.erase(std::unique(joined.begin(), joined.end()), joined.end());
    pending_ = std::move(joined);
  }

  const generator_config& cfg_;
  std::mt19937_64 rng_;
  program p_;
  node_id next_ = 1;
  std::vector<node_id> pending_;
  std::size_t target_ = 0;
};

}  // namespace detail

inline program generate_program(const generator_config& cfg, std::uint64_t program_seed,
                                 std::string name) {
  return detail::program_builder(cfg, program_seed).build(std::move(name));
}

inline std::string corpus_program_name(const generator_config& cfg, std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return cfg.name_prefix + "_" + digits;
}

// Program k is generated from the k-th output of a generator seeded with
// cfg.seed, so every prefix of a corpus is stable.
inline std::vector<program> generate_corpus(const generator_config& cfg, std::size_t count) {
  std::mt19937_64 seeds(cfg.seed);
  std::vector<program> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(generate_program(cfg, seeds(), corpus_program_name(cfg, k)));
  return out;
}

}  // namespace dfbound
