// dfbound_cli: report | generate | corpus
//   exit status 0 ok, 1 usage or input error, 2 some record violates a bound

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dfbound/bounds.hpp"
#include "dfbound/generator.hpp"

namespace fs = std::filesystem;
using namespace dfbound;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_violation = 2;

struct input_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_failure("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw input_failure("cannot write " + out);
  f << text;
}

std::vector<analysis_kind> parse_kinds(const std::vector<std::string>& names) {
  if (names.empty()) return {analysis_kind::constant_propagation, analysis_kind::faint_variables};
  std::vector<analysis_kind> kinds;
  for (const auto& n : names) {
    auto k = parse_analysis_kind(n);
    if (!k) throw input_failure("unknown analysis '" + n + "'");
    kinds.push_back(*k);
  }
  return kinds;
}

program load_program(const fs::path& path) {
  try {
    return parse_program(read_file(path));
  } catch (const parse_error& e) {
    throw input_failure(path.string() + ": " + e.what());
  }
}

std::vector<bounds_record> records_for(const program& p, const std::vector<analysis_kind>& kinds,
                                       const std::string& label) {
  std::vector<bounds_record> out;
  try {
    for (auto k : kinds) out.push_back(make_record(p, k));
  } catch (const invalid_program& e) {
    std::string msg = label + ": invalid program:";
    for (const auto& d : e.diagnostics()) msg += " " + d.to_string();
    throw input_failure(msg);
  }
  return out;
}

bool any_violation(const std::vector<bounds_record>& rs) {
  return std::any_of(rs.begin(), rs.end(), [](const auto& r) { return r.bound_violated; });
}

// Processes files with up to `jobs` threads; results keep the input order.
std::vector<bounds_record> run_files(const std::vector<fs::path>& files,
                                     const std::vector<analysis_kind>& kinds, unsigned jobs) {
  std::vector<std::vector<bounds_record>> per_file(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();) {
      try {
        per_file[i] = records_for(load_program(files[i]), kinds, files[i].string());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  std::vector<std::jthread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (const auto& e : errors)
    if (!e.empty()) throw input_failure(e);
  std::vector<bounds_record> out;
  for (auto& v : per_file) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto dash = s.find('-');
  try {
    if (dash == std::string::npos) {
      const auto v = std::stoul(s);
      return {v, v};
    }
    return {std::stoul(s.substr(0, dash)), std::stoul(s.substr(dash + 1))};
  } catch (const std::exception&) {
    throw input_failure("bad range '" + s + "', expected N or LO-HI");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iteration bounds for round-robin data flow analysis"};
  app.require_subcommand(1);

  std::vector<std::string> analyses;
  std::string format = "csv";
  std::string out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* report = app.add_subcommand("report", "Analyze program files and print bounds");
  std::vector<std::string> inputs;
  report->add_option("files", inputs, "Program files")->required()->check(CLI::ExistingFile);
  report->add_option("--analysis,-a", analyses, "cp, faint, avail, reach or live (repeatable)");
  report->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--out,-o", out, "Output file (default stdout)");
  bool show_edg = false;
  report->add_flag("--edg", show_edg, "Print the dependence graph edges to stderr");

  auto* generate = app.add_subcommand("generate", "Write a seeded random corpus");
  generator_config gen;
  std::size_t count = 1000;
  std::string vars = "4-8";
  generate->add_option("--seed", gen.seed);
  generate->add_option("--count", count);
  generate->add_option("--nodes", gen.max_nodes, "Maximum nodes per program");
  generate->add_option("--vars", vars, "Variable count N or LO-HI");
  generate->add_option("--loop-depth", gen.max_loop_depth);
  generate->add_option("--irreducible", gen.irreducible_probability,
                       "Probability that a loop gets a side entry")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--prefix", gen.name_prefix);
  std::string gen_out;
  generate->add_option("--out,-o", gen_out, "Output directory")->required();

  auto* corpus = app.add_subcommand("corpus", "Run every *.ir file in a directory");
  std::string dir;
  corpus->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);
  corpus->add_option("--analysis,-a", analyses);
  corpus->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  corpus->add_option("--out,-o", out, "Output directory (default: report to stdout only)");
  corpus->add_option("--jobs,-j", jobs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_input;
  }

  try {
    const auto fmt = format == "json" ? report_format::json : report_format::csv;

    if (report->parsed()) {
      const auto kinds = parse_kinds(analyses);
      std::vector<bounds_record> records;
      for (const auto& f : inputs) {
        const program p = load_program(f);
        auto rs = records_for(p, kinds, f);
        records.insert(records.end(), rs.begin(), rs.end());
        if (show_edg)
          for (auto k : kinds) std::cerr << "# " << p.name << " " << to_string(k) << "\n"
                                         << export_edg(build_edg(p, k));
      }
      write_output(emit_report(records, fmt), out);
      return any_violation(records) ? exit_violation : exit_ok;
    }

    if (generate->parsed()) {
      std::tie(gen.min_vars, gen.max_vars) = parse_range(vars);
      if (gen.min_vars == 0 || gen.min_vars > gen.max_vars) throw input_failure("bad --vars range");
      fs::create_directories(gen_out);
      for (const auto& p : generate_corpus(gen, count)) {
        std::ofstream f(fs::path(gen_out) / (p.name + ".ir"));
        if (!f) throw input_failure("cannot write into " + gen_out);
        f << serialize_program(p);
      }
      return exit_ok;
    }

    if (corpus->parsed()) {
      const auto kinds = parse_kinds(analyses);
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".ir") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      const auto records = run_files(files, kinds, jobs);
      const std::string text = emit_report(records, fmt);

      std::size_t acyclic = 0, violations = 0;
      std::vector<bounds_record> cyclic;
      for (const auto& r : records) {
        if (r.acyclic()) ++acyclic;
        else cyclic.push_back(r);
        if (r.bound_violated) ++violations;
      }
      std::ostringstream summary;
      summary << "programs " << files.size() << "\n"
              << "records " << records.size() << "\n"
              << "acyclic " << acyclic << "\n"
              << "violations " << violations << "\n"
              << "median_dev1_cyclic " << median_deviation(cyclic, deviation::b1) << "\n"
              << "median_dev2_cyclic " << median_deviation(cyclic, deviation::b2) << "\n";

      if (out.empty()) {
        std::cout << text;
        std::cerr << summary.str();
      } else {
        fs::create_directories(out);
        const fs::path o(out);
        write_output(text, (o / (fmt == report_format::csv ? "report.csv" : "report.json")).string());
        write_output(format_histogram(deviation_histogram(records, deviation::b1)),
                     (o / "hist_dev1.txt").string());
        write_output(format_histogram(deviation_histogram(records, deviation::b2)),
                     (o / "hist_dev2.txt").string());
        write_output(summary.str(), (o / "summary.txt").string());
      }
      return violations ? exit_violation : exit_ok;
    }
  } catch (const input_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_ok;
}
