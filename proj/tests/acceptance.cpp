// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "dfbound/bounds.hpp"
#include "dfbound/generator.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dfbound;

namespace {

using clock_type = std::chrono::steady_clock;

struct outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool within_one(std::uint32_t got, std::uint32_t want) {
  return got + 1 >= want && got <= want + 1;
}

std::size_t node_of(const entity_dependence_graph& g, const std::string& name) {
  return g.find(name).value_or(g.size());
}

std::set<std::tuple<std::string, std::string, std::uint32_t>> edge_set(const entity_dependence_graph& g) {
  std::set<std::tuple<std::string, std::string, std::uint32_t>> out;
  for (const auto& e : g.edges()) out.insert({g.nodes()[e.src].name(), g.nodes()[e.dst].name(), e.weight});
  return out;
}

std::set<std::string> node_set(const entity_dependence_graph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) out.insert(n.name());
  return out;
}

std::vector<std::uint64_t> delta_vector(const entity_dependence_graph& g, const std::string& entry,
                                        const std::vector<std::string>& targets, std::uint32_t hhat) {
  const edg_components comps(g);
  const auto profile = delta_profile(g, comps, node_of(g, entry), hhat, true);
  std::vector<std::uint64_t> out;
  for (const auto& t : targets) {
    const auto i = node_of(g, t);
    out.push_back(i < g.size() && profile[i] ? *profile[i] : 999);
  }
  return out;
}

// Shared between criteria 6 and 9.
std::vector<bounds_record> corpus_records;

outcome golden(const program& p, analysis_kind kind, std::uint32_t hhat, std::uint64_t h,
               std::uint64_t b1, std::uint32_t iterations) {
  outcome o;
  const auto t0 = clock_type::now();
  const auto r = make_record(p, kind);
  const double secs = seconds_since(t0);
  o.require(r.depth == 3, "d = 3");
  o.require(r.component_height == hhat, "Hhat");
  o.require(r.height == h, "H");
  o.require(r.b1 == b1, "B1");
  o.require(r.delta == 6, "delta = 6");
  o.require(r.b2 == 10, "B2 = 10");
  o.require(within_one(r.iterations, iterations), "I within 1");
  o.require(secs < 1.0, "runtime < 1 s");
  o.detail << " d=" << r.depth << " Hhat=" << r.component_height << " H=" << r.height << " B1=" << r.b1
           << " delta=" << r.delta << " B2=" << r.b2 << " I=" << r.iterations << " (expected " << iterations
           << "+-1) time=" << secs << "s";
  return o;
}

outcome criterion1() {
  return golden(test_support::fig3(), analysis_kind::constant_propagation, 2, 8, 25, 9);
}

outcome criterion2() {
  return golden(test_support::fig3(), analysis_kind::faint_variables, 1, 4, 13, 7);
}

outcome criterion3() {
  outcome o;
  for (auto k : {analysis_kind::constant_propagation, analysis_kind::faint_variables}) {
    const auto a = make_record(test_support::fig3(), k);
    const auto b = make_record(test_support::fig3_swap(), k);
    const std::string n(to_string(k));
    o.require(a.depth == b.depth && a.component_height == b.component_height && a.height == b.height &&
                  a.b1 == b.b1,
              n + " d, Hhat, H, B1 unchanged");
    o.require(within_one(b.iterations, 5), n + " I = 5 +- 1");
    o.detail << " " << n << ": I " << a.iterations << " -> " << b.iterations << " (B1 " << b.b1 << ")";
  }
  return o;
}

outcome criterion4() {
  outcome o;
  const auto p = test_support::fig3();
  const auto cp = build_edg(p, analysis_kind::constant_propagation);
  const auto fv = build_edg(p, analysis_kind::faint_variables);
  o.require(node_set(cp) == std::set<std::string>{"w_1", "x_5", "y_6", "z_7", "w_8"}, "CP nodes");
  std::set<std::pair<std::string, std::string>> cp_edges;
  for (const auto& [s, d, w] : edge_set(cp)) cp_edges.insert({s, d});
  o.require(cp_edges == std::set<std::pair<std::string, std::string>>{
                            {"w_1", "z_7"}, {"w_8", "z_7"}, {"z_7", "y_6"}, {"y_6", "x_5"}, {"x_5", "w_8"}},
            "CP edges");
  o.require(node_set(fv) == std::set<std::string>{"x_2", "y_5", "z_6", "w_7", "x_8"}, "FV nodes");
  std::set<std::pair<std::string, std::string>> fv_edges;
  for (const auto& [s, d, w] : edge_set(fv)) fv_edges.insert({s, d});
  o.require(fv_edges == std::set<std::pair<std::string, std::string>>{
                            {"x_2", "y_5"}, {"x_8", "y_5"}, {"y_5", "z_6"}, {"z_6", "w_7"}, {"w_7", "x_8"}},
            "FV edges");
  const auto wt = [&](const char* a, const char* b) -> long {
    auto e = fv.edge_between(node_of(fv, a), node_of(fv, b));
    return e ? static_cast<long>(e->weight) : -1;
  };
  o.require(wt("x_2", "y_5") == 3, "Wt(x_2->y_5) = 3");
  o.require(wt("x_8", "y_5") == 0, "Wt(x_8->y_5) = 0");
  const std::vector<std::uint64_t> expect{0, 6, 6, 6, 6};
  const auto dcp = delta_vector(cp, "w_1", {"w_1", "z_7", "y_6", "x_5", "w_8"}, 2);
  const auto dfv = delta_vector(fv, "x_2", {"x_2", "y_5", "z_6", "w_7", "x_8"}, 1);
  o.require(dcp == expect, "CP Delta vector");
  o.require(dfv == expect, "FV Delta vector");
  o.detail << " Wt(x_2->y_5)=" << wt("x_2", "y_5") << " Wt(x_8->y_5)=" << wt("x_8", "y_5") << " CP Delta={";
  for (std::size_t i = 0; i < dcp.size(); ++i) o.detail << (i ? "," : "") << dcp[i];
  o.detail << "} FV Delta={";
  for (std::size_t i = 0; i < dfv.size(); ++i) o.detail << (i ? "," : "") << dfv[i];
  o.detail << "}";
  return o;
}

outcome criterion5(const std::vector<program>& corpus) {
  outcome o;
  std::size_t records = 0, exceptions = 0;
  for (const auto& p : corpus) {
    for (auto k : {analysis_kind::available_expressions, analysis_kind::reaching_definitions,
                   analysis_kind::live_variables}) {
      const auto r = make_record(p, k);
      ++records;
      if (r.delta != 0 || r.iterations > 1 + r.depth) {
        if (++exceptions <= 3) o.detail << " " << p.name << "/" << to_string(k);
      }
    }
  }
  o.require(exceptions == 0, "delta = 0 and I <= 1 + d everywhere");
  o.detail << " records=" << records << " exceptions=" << exceptions;
  return o;
}

outcome criterion6(const std::vector<program>& corpus) {
  outcome o;
  const auto t0 = clock_type::now();
  std::size_t v2 = 0, v1 = 0;
  for (const auto& p : corpus) {
    for (auto k : {analysis_kind::constant_propagation, analysis_kind::faint_variables}) {
      const auto r = make_record(p, k);
      if (r.iterations > r.b2) ++v2;
      if (r.iterations > r.b1) ++v1;
      if (r.bound_violated && v1 + v2 <= 3) o.detail << " violated:" << p.name << "/" << to_string(k);
      corpus_records.push_back(r);
    }
  }
  const double secs = seconds_since(t0);
  o.require(v2 == 0, "I <= 1 + delta + d");
  o.require(v1 == 0, "I <= 1 + d*H");
  o.require(secs < 300, "runtime < 5 min");
  o.detail << " programs=" << corpus.size() << " records=" << corpus_records.size() << " B2 violations=" << v2
           << " B1 violations=" << v1 << " time=" << secs << "s";
  return o;
}

// Extra small programs so that the exhaustive oracles see enough cases with
// loops and side entries.
std::vector<program> oracle_programs(const std::vector<program>& corpus) {
  std::vector<program> out = corpus;
  generator_config cfg;
  cfg.seed = 4242;
  cfg.max_nodes = 12;
  cfg.irreducible_probability = 0.3;
  for (auto& p : generate_corpus(cfg, 300)) out.push_back(std::move(p));
  cfg.seed = 4243;
  cfg.max_nodes = 20;
  cfg.name_prefix = "edg";
  for (auto& p : generate_corpus(cfg, 300)) out.push_back(std::move(p));
  return out;
}

outcome criterion7(const std::vector<program>& corpus) {
  outcome o;
  std::size_t fixpoint_checked = 0, fixpoint_bad = 0;
  for (const auto& p : corpus) {
    const control_flow_graph g(p);
    for (auto k : all_analysis_kinds) {
      std::visit(
          [&](const auto& fw) {
            const auto rr = round_robin_solve(fw, g, {default_pass_convention, false});
            const auto wl = worklist_solve(fw, g, {default_pass_convention, false});
            ++fixpoint_checked;
            if (!(rr.in == wl.in && rr.out == wl.out)) ++fixpoint_bad;
          },
          make_framework(p, k));
    }
  }
  o.require(fixpoint_bad == 0, "round robin == worklist");

  std::size_t path_checked = 0, path_bad = 0, edg_checked = 0, edg_cyclic = 0, edg_bad = 0;
  for (const auto& p : oracle_programs(corpus)) {
    const control_flow_graph g(p);
    if (g.size() <= 12) {
      ++path_checked;
      const auto expected = oracle::enumerate_paths(g);
      const backedge_paths bp(g);
      bool ok = bp.depth() == expected.depth;
      for (node_id a : g.nodes())
        for (node_id b : g.nodes()) {
          if (a == b) continue;
          const auto it = expected.acyclic.find({a, b});
          const auto want = it == expected.acyclic.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
          ok = ok && bp.acyclic_weight(a, b) == want;
        }
      if (!ok) ++path_bad;
    }
    for (auto k : {analysis_kind::constant_propagation, analysis_kind::faint_variables}) {
      const auto edg = build_edg(p, k);
      if (edg.size() > 10) continue;
      ++edg_checked;
      edg_cyclic += !oracle::simple_cycles(edg).empty();
      const std::uint32_t hhat = k == analysis_kind::constant_propagation ? 2 : 1;
      if (degree_of_dependence(edg, hhat, true).delta != oracle::delta(edg, hhat, true)) ++edg_bad;
    }
  }
  o.require(path_bad == 0, "depth and weights match path enumeration");
  o.require(edg_bad == 0, "delta matches path-structure enumeration");
  o.require(path_checked > 0 && edg_checked > 0, "oracles exercised");
  o.detail << " fixpoints=" << fixpoint_checked << " mismatches=" << fixpoint_bad
           << "; cfgs<=12 nodes=" << path_checked << " mismatches=" << path_bad
           << "; edgs<=10 nodes=" << edg_checked << " (cyclic " << edg_cyclic << ") mismatches=" << edg_bad;
  return o;
}

outcome criterion8(const std::vector<program>& corpus) {
  outcome o;
  dependence_audit total;
  auto add = [&](const dependence_audit& a) {
    total.checked += a.checked;
    total.violations += a.violations;
  };
  for (const auto& p : corpus) {
    const control_flow_graph g(p);
    const auto cp = make_constant_propagation(p);
    add(audit_entity_dependence<cp_lattice>(build_edg(p, analysis_kind::constant_propagation), cp.entities,
                                            round_robin_solve(cp, g).trace));
    const auto fv = make_faint_variables(p);
    add(audit_entity_dependence<two_point_lattice>(build_edg(p, analysis_kind::faint_variables), fv.entities,
                                                   round_robin_solve(fv, g).trace));
  }
  o.require(total.violations == 0, "ht(u) >= ht(v) on every EDG-edge transition");
  o.require(total.checked > 0, "transitions checked");
  o.detail << " EDG-edge transitions=" << total.checked << " violations=" << total.violations;
  return o;
}

outcome criterion9(bool criterion6_passed) {
  outcome o;
  std::vector<bounds_record> cyclic;
  for (const auto& r : corpus_records)
    if (!r.acyclic()) cyclic.push_back(r);
  const double m1 = median_deviation(cyclic, deviation::b1);
  const double m2 = median_deviation(cyclic, deviation::b2);
  const double a1 = median_deviation(corpus_records, deviation::b1);
  const double a2 = median_deviation(corpus_records, deviation::b2);
  o.require(criterion6_passed, "criterion 6");
  o.require(!cyclic.empty() && m2 < m1, "median(dev2) < median(dev1)");
  o.detail << " cyclic records=" << cyclic.size() << " median dev1=" << m1 << " dev2=" << m2
           << "; all records median dev1=" << a1 << " dev2=" << a2;
  return o;
}

}  // namespace

int main() {
  generator_config cfg;  // 1000 programs, <= 60 nodes, 4-8 variables, seed 42
  const auto corpus = generate_corpus(cfg, 1000);

  bool all = true;
  auto report = [&](int n, const std::function<outcome()>& check) -> bool {
    outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << o.detail.str() << std::endl;
    all = all && o.pass;
    return o.pass;
  };

  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, [&] { return criterion5(corpus); });
  const bool c6 = report(6, [&] { return criterion6(corpus); });
  report(7, [&] { return criterion7(corpus); });
  report(8, [&] { return criterion8(corpus); });
  report(9, [&] { return criterion9(c6); });
  return all ? 0 : 1;
}
