#include <gtest/gtest.h>

#include "dfbound/analyses.hpp"
#include "dfbound/generator.hpp"
#include "dfbound/solver.hpp"
#include "oracles.hpp"

using namespace dfbound;

TEST(Generator, Deterministic) {
  generator_config cfg;
  cfg.seed = 1;
  const auto a = generate_corpus(cfg, 20);
  const auto b = generate_corpus(cfg, 20);
  EXPECT_EQ(a, b);
  cfg.seed = 2;
  EXPECT_NE(generate_corpus(cfg, 20), a);
}

TEST(Generator, PrefixStable) {
  generator_config cfg;
  const auto five = generate_corpus(cfg, 5);
  const auto ten = generate_corpus(cfg, 10);
  EXPECT_TRUE(std::equal(five.begin(), five.end(), ten.begin()));
  EXPECT_EQ(ten[3].name, "gen_0003");
}

TEST(Generator, RespectsBudgetsAndValidates) {
  for (double irr : {0.0, 0.4}) {
    generator_config cfg;
    cfg.seed = 9;
    cfg.irreducible_probability = irr;
    for (const auto& p : generate_corpus(cfg, 300)) {
      EXPECT_LE(p.nodes.size(), 60u) << p.name;
      EXPECT_GE(p.variables.size(), 4u);
      EXPECT_LE(p.variables.size(), 8u);
      EXPECT_TRUE(validate_program(p).empty()) << p.name;
    }
  }
}

TEST(Generator, ReducibleWithoutSideEntries) {
  generator_config cfg;
  cfg.seed = 10;
  std::size_t loops = 0;
  for (const auto& p : generate_corpus(cfg, 300)) {
    const control_flow_graph g(p);
    EXPECT_TRUE(oracle::reducible(g)) << serialize_program(p);
    loops += !oracle::back_edges(g).empty();
  }
  EXPECT_GT(loops, 50u);
}

TEST(Generator, SideEntriesProduceIrreducibleGraphs) {
  generator_config cfg;
  cfg.seed = 10;
  cfg.irreducible_probability = 1.0;
  std::size_t irreducible = 0;
  for (const auto& p : generate_corpus(cfg, 200)) irreducible += !oracle::reducible(control_flow_graph(p));
  EXPECT_GT(irreducible, 20u);
}

TEST(Generator, AnalysesTerminateOnGeneratedPrograms) {
  generator_config cfg;
  cfg.seed = 12;
  cfg.irreducible_probability = 0.3;
  for (const auto& p : generate_corpus(cfg, 100)) {
    const control_flow_graph g(p);
    for (auto k : all_analysis_kinds)
      std::visit([&](const auto& fw) { EXPECT_NO_THROW(round_robin_solve(fw, g, {default_pass_convention, false})); },
                 make_framework(p, k));
  }
}

TEST(Generator, VariableRangeAndMix) {
  generator_config cfg;
  cfg.min_vars = cfg.max_vars = 2;
  cfg.mix = {0, 0, 0, 0, 0, 1};
  const auto p = generate_program(cfg, 5, "skips");
  EXPECT_EQ(p.variables.size(), 2u);
  for (const auto& [id, s] : p.nodes) {
    if (id == 1 || std::holds_alternative<print_stmt>(s)) continue;
    EXPECT_TRUE(std::holds_alternative<skip_stmt>(s)) << id;
  }
}
