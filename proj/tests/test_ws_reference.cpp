#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "lws/lws_tree.hpp"
#include "lws/ws_reference.hpp"

using namespace lws;
using Orders = std::vector<std::vector<Key>>;

namespace {

// History-replay oracle: w(y) is the number of distinct keys in the access
// log after y's last entry. Deleted keys are dropped from the log.
struct NaiveHistory {
  std::vector<Key> log;
  std::set<Key> present;

  void access(Key k) {
    log.push_back(k);
    present.insert(k);
  }
  void erase(Key k) {
    std::erase(log, k);
    present.erase(k);
  }
  std::uint64_t w(Key y) const {
    if (!present.count(y)) return present.size();
    std::set<Key> seen;
    for (auto it = log.rbegin(); it != log.rend() && *it != y; ++it) seen.insert(*it);
    return seen.size();
  }
  double ub(Key x) const {
    std::vector<Key> sorted(present.begin(), present.end());
    auto rank = [&](Key k) { return std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin(); };
    double best = INFINITY;
    for (Key y : sorted) {
      auto d = static_cast<double>(std::abs(rank(x) - rank(y)));
      best = std::min(best, std::log2(static_cast<double>(w(y)) + d + 2.0));
    }
    return best;
  }
};

}  // namespace

TEST(Lg, Values) {
  EXPECT_DOUBLE_EQ(lg(0), 1.0);
  EXPECT_DOUBLE_EQ(lg(2), 2.0);
  EXPECT_DOUBLE_EQ(lg(14), 4.0);
}

TEST(ReferenceStructure, InsertOneToFive) {
  ReferenceStructure r;
  for (Key k = 1; k <= 5; ++k) r.insert(k);
  EXPECT_EQ(r.orders(), (Orders{{2, 3, 4, 5}, {1}}));
  EXPECT_EQ(r.search(1), 2);
  EXPECT_EQ(r.orders(), (Orders{{3, 4, 5, 1}, {2}}));
  EXPECT_EQ(r.search(9), 0);
  EXPECT_EQ(r.orders(), (Orders{{3, 4, 5, 1}, {2}}));
  r.erase(2);
  EXPECT_EQ(r.orders(), (Orders{{3, 4, 5, 1}}));
}

TEST(ReferenceStructure, ShiftBothWays) {
  ReferenceStructure r;
  for (Key k = 1; k <= 5; ++k) r.insert(k);
  r.shift(1, 1);
  EXPECT_EQ(r.orders(), (Orders{{2, 3, 4, 5}, {1}}));
  r.shift(1, 2);
  EXPECT_EQ(r.orders(), (Orders{{3, 4, 5}, {1, 2}}));
  r.shift(2, 1);
  EXPECT_EQ(r.orders(), (Orders{{3, 4, 5, 2}, {1}}));
}

TEST(ReferenceStructure, Errors) {
  ReferenceStructure r;
  r.insert(1);
  EXPECT_THROW(r.insert(1), KeyError);
  EXPECT_THROW(r.erase(2), KeyError);
}

TEST(WorkingSetTracker, Examples) {
  WorkingSetTracker ws;
  for (Key k = 0; k < 10; ++k) ws.record_access(k);
  EXPECT_EQ(ws.working_set_number(100), 10u);
  EXPECT_EQ(ws.working_set_number(9), 0u);
  WorkingSetTracker abc;
  abc.record_access(1);
  abc.record_access(2);
  abc.record_access(3);
  EXPECT_EQ(abc.working_set_number(1), 2u);
  abc.record_access(1);
  EXPECT_EQ(abc.working_set_number(1), 0u);
  EXPECT_EQ(abc.working_set_number(2), 2u);
}

TEST(WorkingSetTracker, MatchesHistoryReplay) {
  WorkingSetTracker ws;
  NaiveHistory naive;
  std::mt19937 rng(5);
  for (int i = 0; i < 3000; ++i) {
    Key k = static_cast<Key>(rng() % 80);
    if (rng() % 5 == 0) {
      ws.erase(k);
      naive.erase(k);
    } else {
      ASSERT_EQ(ws.working_set_number(k), naive.w(k)) << "step " << i;
      ws.record_access(k);
      naive.access(k);
    }
  }
}

TEST(UnifiedBoundTracker, Examples) {
  UnifiedBoundTracker ub;
  for (Key k = 1; k <= 20; ++k) ub.record_access(k);
  ub.record_access(7);
  EXPECT_DOUBLE_EQ(*ub.unified_bound(7), 1.0);
  ub.record_access(10);
  EXPECT_LE(*ub.unified_bound(11), std::log2(3.0) + 1e-12);
  EXPECT_FALSE(ub.unified_bound(99).has_value());
}

TEST(UnifiedBoundTracker, MatchesQuadraticRecompute) {
  UnifiedBoundTracker ub;
  NaiveHistory naive;
  std::mt19937 rng(9);
  for (int i = 0; i < 1000; ++i) {
    Key k = static_cast<Key>(rng() % 120);
    if (rng() % 6 == 0) {
      ub.erase(k);
      naive.erase(k);
      continue;
    }
    if (naive.present.count(k)) {
      ASSERT_DOUBLE_EQ(*ub.unified_bound(k), naive.ub(k)) << "step " << i;
    }
    ub.record_access(k);
    naive.access(k);
  }
}

TEST(ReferenceStructure, StepEquivalentToLayeredTree) {
  std::mt19937 rng(21);
  for (int trace = 0; trace < 5; ++trace) {
    ReferenceStructure ref;
    LayeredTree tree;
    for (int i = 0; i < 3000; ++i) {
      Key k = static_cast<Key>(rng() % 200);
      const bool present = ref.level_of(k) != 0;
      switch (rng() % 3) {
        case 0:
          if (!present) {
            ref.insert(k);
            tree.insert(k);
          }
          break;
        case 1:
          if (present) {
            ref.erase(k);
            tree.erase(k);
          }
          break;
        default: {
          int j = ref.search(k);
          EXPECT_EQ(tree.search(k), j != 0);
          EXPECT_EQ(tree.last_layer_found(), j);
        }
      }
      ASSERT_EQ(tree.layer_orders_unmetered(), ref.orders()) << "trace " << trace << " step " << i;
    }
  }
}
