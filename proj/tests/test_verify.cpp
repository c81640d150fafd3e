#include <gtest/gtest.h>

#include "corruptions.hpp"
#include "lws/validate.hpp"

using namespace lws;
using namespace lws::testing;

TEST(Verify, FixtureIsValid) {
  LayeredTree t = corruption_fixture();
  auto rep = verify(t);
  EXPECT_TRUE(rep.ok()) << rep.to_string();
  EXPECT_EQ(t.layer_orders_unmetered().size(), 4u);
  EXPECT_GT(rep.checks, 300u);
}

TEST(Verify, CatalogueHasTwentyEntries) { EXPECT_EQ(corruption_catalogue().size(), 20u); }

class CorruptionTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CorruptionTest, DetectedWithWitness) {
  const Corruption c = corruption_catalogue().at(GetParam());
  LayeredTree t = corruption_fixture();
  const Expected e = c.apply(t);
  auto rep = verify(t);
  EXPECT_FALSE(rep.ok()) << c.name;
  EXPECT_TRUE(detected(rep, e)) << c.name << "\nwanted " << e.invariant
                                << (e.witness ? " key=" + std::to_string(*e.witness) : "") << "\ngot\n"
                                << rep.to_string();
}

INSTANTIATE_TEST_SUITE_P(All, CorruptionTest, ::testing::Range<std::size_t>(0, 20));

TEST(Verify, BstOrderAndParentLinks) {
  LayeredTree t = corruption_fixture();
  Engine& eng = t.engine();
  NodeId a = eng.find_unmetered(10);
  NodeId b = eng.find_unmetered(200);
  std::swap(eng[a].key, eng[b].key);
  EXPECT_TRUE(verify_bst(eng).has("bst-order"));
  std::swap(eng[a].key, eng[b].key);
  NodeId r = t.root_unmetered();
  NodeId c = eng[r].left;
  eng[c].parent = eng[r].right;
  EXPECT_TRUE(verify_bst(eng).has("parent-link", eng[c].key));
}

TEST(Verify, DepthBoundSchedule) {
  EXPECT_EQ(depth_bound(1), 6u);
  EXPECT_EQ(depth_bound(2), 16u);
  EXPECT_EQ(depth_bound(3), 34u);
}
