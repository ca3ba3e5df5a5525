#pragma once

// Predicted iteration bounds against measured round-robin iterations.
//   B1 = 1 + d * H           (d: CFG depth, H = Hhat * xi)
//   B2 = 1 + delta + d       (delta: degree of dependence)

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dfbound/analyses.hpp"
#include "dfbound/cfg_metrics.hpp"
#include "dfbound/edg.hpp"
#include "dfbound/solver.hpp"

namespace dfbound {

inline std::uint64_t simplistic_bound(std::uint64_t depth, std::uint64_t height) {
  return 1 + depth * height;
}

inline std::uint64_t edg_bound(std::uint64_t depth, std::uint64_t delta) {
  return 1 + delta + depth;
}

struct bounds_record {
  std::string program;
  analysis_kind analysis = analysis_kind::constant_propagation;
  std::size_t nodes = 0;
  std::size_t entities = 0;  // xi
  std::uint32_t depth = 0;
  std::uint32_t component_height = 0;
  std::uint64_t height = 0;
  std::uint64_t delta = 0;
  std::uint64_t b1 = 0;
  std::uint64_t b2 = 0;
  std::uint32_t iterations = 0;
  std::int64_t dev1 = 0;
  std::int64_t dev2 = 0;
  bool bound_violated = false;

  // Acyclic programs are reported but flagged; their bounds are trivially 1.
  bool acyclic() const noexcept { return depth == 0; }
};

struct record_options {
  search_limits cfg_limits{};
  delta_limits edg_limits{};
  pass_convention convention = default_pass_convention;
};

inline bounds_record finish_record(bounds_record r) {
  r.b1 = simplistic_bound(r.depth, r.height);
  r.b2 = edg_bound(r.depth, r.delta);
  r.dev1 = static_cast<std::int64_t>(r.b1) - r.iterations;
  r.dev2 = static_cast<std::int64_t>(r.b2) - r.iterations;
  r.bound_violated = r.iterations > r.b2 || r.iterations > r.b1;
  return r;
}

inline bounds_record make_record(const program& p, analysis_kind kind, record_options opts = {}) {
  const control_flow_graph cfg(p);
  bounds_record r;
  r.program = p.name;
  r.analysis = kind;
  r.nodes = cfg.size();
  r.depth = backedge_paths(cfg, opts.cfg_limits).depth();

  std::visit(
      [&](const auto& fw) {
        r.entities = fw.entity_count();
        r.component_height = fw.component_height();
        r.height = fw.height();
        const auto solved = round_robin_solve(fw, cfg, {opts.convention, false});
        r.iterations = solved.iterations;
        const auto g = build_edg(p, kind, opts.cfg_limits);
        r.delta = degree_of_dependence(g, fw.component_height(), fw.monotonic_entity_dependence,
                                       opts.edg_limits)
                      .delta;
      },
      make_framework(p, kind));
  return finish_record(r);
}

enum class report_format { csv, json };

inline constexpr const char* csv_header = "program,analysis,nodes,vars,d,H,delta,B1,B2,I,dev1,dev2,violated";

inline std::string emit_report(const std::vector<bounds_record>& records, report_format format) {
  if (format == report_format::csv) {
    std::ostringstream os;
    os << csv_header << "\n";
    for (const auto& r : records) {
      os << r.program << "," << to_string(r.analysis) << "," << r.nodes << "," << r.entities << ","
         << r.depth << "," << r.height << "," << r.delta << "," << r.b1 << "," << r.b2 << ","
         << r.iterations << "," << r.dev1 << "," << r.dev2 << ","
         << (r.bound_violated ? "true" : "false") << "\n";
    }
    return os.str();
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["program"] = r.program;
    o["analysis"] = std::string(to_string(r.analysis));
    o["nodes"] = r.nodes;
    o["vars"] = r.entities;
    o["d"] = r.depth;
    o["H"] = r.height;
    o["delta"] = r.delta;
    o["B1"] = r.b1;
    o["B2"] = r.b2;
    o["I"] = r.iterations;
    o["dev1"] = r.dev1;
    o["dev2"] = r.dev2;
    o["violated"] = r.bound_violated;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

enum class deviation { b1, b2 };

// deviation value -> number of records
inline std::map<std::int64_t, std::size_t> deviation_histogram(
    const std::vector<bounds_record>& records, deviation which) {
  std::map<std::int64_t, std::size_t> h;
  for (const auto& r : records) ++h[which == deviation::b1 ? r.dev1 : r.dev2];
  return h;
}

inline std::string format_histogram(const std::map<std::int64_t, std::size_t>& h) {
  std::ostringstream os;
  os << "# deviation count\n";
  for (const auto& [dev, count] : h) os << dev << " " << count << "\n";
  return os.str();
}

inline double median_deviation(const std::vector<bounds_record>& records, deviation which) {
  if (records.empty()) return 0.0;
  std::vector<std::int64_t> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(which == deviation::b1 ? r.dev1 : r.dev2);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

}  // namespace dfbound
