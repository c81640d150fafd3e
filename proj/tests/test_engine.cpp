#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "lws/engine.hpp"

using namespace lws;

namespace {

// Builds a balanced tree over sorted keys, all layer 1, no queue state.
NodeId build_balanced(Engine& eng, const std::vector<Key>& keys, std::size_t lo, std::size_t hi) {
  if (lo >= hi) return kNil;
  std::size_t mid = lo + (hi - lo) / 2;
  NodeId n = eng.allocate(keys[mid]);
  eng.set_child(n, Dir::left, build_balanced(eng, keys, lo, mid));
  eng.set_child(n, Dir::right, build_balanced(eng, keys, mid + 1, hi));
  return n;
}

Engine balanced(const std::vector<Key>& keys) {
  Engine eng;
  eng.set_root(build_balanced(eng, keys, 0, keys.size()));
  return eng;
}

}  // namespace

TEST(Engine, SearchHitCountsPath) {
  Engine eng = balanced({1, 2, 3});
  eng.begin_operation();
  auto before = eng.visits();
  SearchResult r = eng.search_from_root(3);
  EXPECT_TRUE(r.found);
  EXPECT_EQ(eng[r.node].key, 3);
  EXPECT_EQ(eng.visits() - before, 2u);
}

TEST(Engine, SearchMissStopsAtLastNode) {
  Engine eng = balanced({1, 2, 3});
  eng.begin_operation();
  SearchResult r = eng.search_from_root(5);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(eng[r.node].key, 3);
  EXPECT_EQ(eng.visits(), 2u);
}

TEST(Engine, EmptyTreeMiss) {
  Engine eng;
  eng.begin_operation();
  SearchResult r = eng.search_from_root(1);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.node, kNil);
  EXPECT_EQ(eng.visits(), 0u);
}

TEST(Engine, WalkBackToRootIsCharged) {
  std::vector<Key> keys(15);
  std::iota(keys.begin(), keys.end(), 1);
  Engine eng = balanced(keys);
  eng.begin_operation();
  SearchResult r = eng.search_from_root(1);
  ASSERT_TRUE(r.found);
  const auto depth = eng.depth_unmetered(r.node);
  EXPECT_EQ(eng.visits(), depth + 1);
  eng.search_from_root(15);
  // depth edges back up, then depth edges down
  EXPECT_EQ(eng.visits(), depth + 1 + 2 * depth);
}

TEST(Engine, RotateChainLeftTwice) {
  Engine eng;
  NodeId a = eng.allocate(1);
  NodeId b = eng.allocate(2);
  NodeId c = eng.allocate(3);
  eng.set_root(a);
  eng.set_child(a, Dir::right, b);
  eng.set_child(b, Dir::right, c);
  eng[a].header = RootHeader{1, 3};
  eng.rotate(a, Dir::left);
  EXPECT_EQ(eng.root(), b);
  EXPECT_TRUE(eng[b].header.has_value());
  EXPECT_FALSE(eng[a].header.has_value());
  eng.rotate(b, Dir::left);
  EXPECT_EQ(eng.root(), c);
  EXPECT_EQ(eng.inorder_keys(), (std::vector<Key>{1, 2, 3}));
  EXPECT_EQ(eng[c].header, (RootHeader{1, 3}));
}

TEST(Engine, RotationPairIsIdentity) {
  Engine eng = balanced({1, 2, 3, 4, 5, 6, 7});
  NodeId r = eng.root();
  NodeId l = eng[r].left;
  eng.rotate(r, Dir::right);
  EXPECT_EQ(eng.root(), l);
  eng.rotate(l, Dir::left);
  EXPECT_EQ(eng.root(), r);
  EXPECT_EQ(eng[r].left, l);
  EXPECT_EQ(eng[eng[r].left].key, 2);
  EXPECT_EQ(eng[eng[r].right].key, 6);
}

TEST(Engine, RandomRotationsKeepOrder) {
  std::vector<Key> keys(50);
  std::iota(keys.begin(), keys.end(), 100);
  Engine eng = balanced(keys);
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto live = eng.live_nodes();
    NodeId x = live[rng() % live.size()];
    Dir d = rng() % 2 ? Dir::left : Dir::right;
    if (eng.child(x, opposite(d)) == kNil) continue;
    eng.rotate(x, d);
    ASSERT_EQ(eng.inorder_keys(), keys);
  }
}

TEST(Engine, RotateAcrossLayerThrows) {
  Engine eng = balanced({1, 2, 3});
  eng[eng[eng.root()].left].layer = 2;
  EXPECT_THROW(eng.rotate(eng.root(), Dir::right), InvariantError);
}

TEST(Engine, InorderKeys) {
  Engine empty;
  EXPECT_TRUE(empty.inorder_keys().empty());
  Engine eng = balanced({1, 2, 3});
  EXPECT_EQ(eng.inorder_keys(), (std::vector<Key>{1, 2, 3}));
}
