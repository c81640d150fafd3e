#include <gtest/gtest.h>

#include <sstream>

#include "lws/runner.hpp"

using namespace lws;

namespace {

Constants loose() { return Constants{1e6, 1e6, 1e6, 1e6, 1e6, 10}; }

Trace scenario_a() { return parse("I 1\nI 2\nI 3\nI 4\nI 5\nS 1\nS 9\nD 2\n"); }

}  // namespace

TEST(Runner, ScenarioA) {
  Runner r(RunConfig{Structure::lws, 1, 0, true}, loose());
  RunSummary s = r.run(scenario_a());
  EXPECT_TRUE(s.ok()) << s.messages.size();
  EXPECT_EQ(s.ops, 8u);
  ASSERT_EQ(s.final_layers.size(), 1u);
  EXPECT_EQ(s.final_layers[0], (std::vector<Key>{3, 4, 5, 1}));
  ASSERT_EQ(s.rows.size(), 8u);
  EXPECT_EQ(s.rows[5].layer, 2);  // key 1 sat in L_2 after five inserts
  EXPECT_EQ(s.rows[6].layer, 0);
  EXPECT_FALSE(s.rows[6].w.has_value());
}

TEST(Runner, ReferenceMatchesLayered) {
  Trace t = generate({Family::mixed, 200, 3000, 5, 1.0, 8});
  RunSummary a = Runner(RunConfig{Structure::lws, 50, 0, false}, loose()).run(t);
  RunSummary b = Runner(RunConfig{Structure::ws_reference, 50, 0, false}, loose()).run(t);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.final_layers, b.final_layers);
}

TEST(Runner, SkipSplayRejectsUpdates) {
  Runner r(RunConfig{Structure::skip_splay, 1, 2, true}, loose());
  EXPECT_THROW(r.run(parse("S 1\nI 5\n")), IncompatibleTrace);
}

TEST(Runner, SkipSplayRejectsOutOfUniverse) {
  Runner r(RunConfig{Structure::skip_splay, 1, 2, true}, loose());
  EXPECT_THROW(r.run(parse("S 16\n")), IncompatibleTrace);
}

TEST(Runner, SkipSplayNeedsK) {
  EXPECT_THROW(Runner(RunConfig{Structure::skip_splay, 1, 0, true}, loose()), std::invalid_argument);
  EXPECT_THROW(Runner(RunConfig{Structure::lws, 0, 0, true}, loose()), std::invalid_argument);
}

TEST(Runner, SkipSplayRowsCountSearchedTrees) {
  Runner r(RunConfig{Structure::skip_splay, 1, 3, true}, loose());
  RunSummary s = r.run(parse("S 1\nS 2\nS 8\n"));
  EXPECT_TRUE(s.ok());
  // heights 1, 2, 4 with bands {1}, {2}, {3,4}
  EXPECT_EQ(s.rows[0].layer, 3);
  EXPECT_EQ(s.rows[1].layer, 2);
  EXPECT_EQ(s.rows[2].layer, 1);
  for (const auto& row : s.rows) EXPECT_GT(row.cost, 0u);
}

TEST(Runner, TightConstantsReportBoundViolations) {
  Runner r(RunConfig{Structure::lws, 1, 0, true}, Constants{0.5, 0.5, 0.5, 0.5, 0, 10});
  RunSummary s = r.run(scenario_a());
  EXPECT_FALSE(s.ok());
  EXPECT_GT(s.bound_violations, 0u);
  EXPECT_FALSE(s.messages.empty());
}

TEST(Runner, RedBlackBaseline) {
  Trace t = with_preload(generate({Family::uniform, 500, 2000, 3, 1.0, 8}), 500, 3);
  RunSummary s = Runner(RunConfig{Structure::redblack_baseline, 100, 0, true}, loose()).run(t);
  EXPECT_TRUE(s.ok());
  // red-black height on 500 keys is at most 2 log2(501) < 18 edges
  for (const auto& row : s.rows) {
    if (row.op != OpKind::search) continue;
    EXPECT_LE(row.cost, 18u);
  }
}

TEST(Runner, CsvColumns) {
  RunSummary s = Runner(RunConfig{Structure::lws, 1, 0, true}, loose()).run(scenario_a());
  std::ostringstream os;
  write_csv(os, s.rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "i,op,key,cost,layer,w,ub,bound");
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
  }
  EXPECT_EQ(n, 8u);
}

TEST(Runner, JsonKeys) {
  RunSummary s = Runner(RunConfig{Structure::lws, 1, 0, false}, loose()).run(scenario_a());
  auto j = summary_json(s);
  for (const char* k : {"ops", "max_cost", "mean_cost", "max_cost_over_lgw", "amortized_ratio", "violations",
                        "max_update_over_lgn", "bound_violations", "invariant_checks", "messages", "final_layers"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["ops"], 8);
}

TEST(Runner, SkipKForUniverse) {
  EXPECT_EQ(skip_k_for(3), 2);
  EXPECT_EQ(skip_k_for(15), 3);
  EXPECT_EQ(skip_k_for(255), 4);
  EXPECT_EQ(skip_k_for(65535), 5);
  EXPECT_EQ(skip_k_for(100), 0);
}

TEST(Runner, StructureNames) {
  EXPECT_EQ(parse_structure("skip_splay_doubled"), Structure::skip_splay_doubled);
  EXPECT_THROW(parse_structure("splay"), std::invalid_argument);
}
