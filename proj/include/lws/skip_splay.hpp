#pragma once

// Skip-splay over the static universe {1..n}, n = 2^(2^(k-1)) - 1, with a
// layered working-set tree in place of each splay tree. The perfectly
// balanced tree on {1..n} is cut at heights 1, 2, 4, ..., 2^(k-1); each band
// becomes one auxiliary tree, and all auxiliary trees share one engine so
// that an access pays for the whole root-to-x path.

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lws/engine.hpp"
#include "lws/lws_tree.hpp"
#include "lws/validate.hpp"

namespace lws {

class SkipSplayTree {
 public:
  /// Builds the structure for 2 <= k <= 5.
  explicit SkipSplayTree(int k) : eng_(std::make_unique<Engine>()), k_(k) {
    if (k < 2 || k > 5) throw std::invalid_argument("skip-splay parameter k must be in 2..5");
    height_ = 1 << (k - 1);
    n_ = (Key{1} << height_) - 1;

    // Band roots by marked height, deepest band last.
    for (int i = k - 1; i >= 0; --i) {
      const int h = 1 << i;
      const int lo = i == 0 ? 0 : (1 << (i - 1));  // band holds heights (lo, h]
      for (Key r = Key{1} << (h - 1); r <= n_; r += Key{1} << h) {
        const std::uint32_t dom = static_cast<std::uint32_t>(trees_.size());
        trees_.emplace_back(*eng_, dom);
        LayeredTree& t = trees_.back();
        std::vector<Key> keys;
        const Key span = (Key{1} << (h - 1)) - 1;
        for (Key x = r - span; x <= r + span; ++x)
          if (height_of(x) > lo) keys.push_back(x);
        bool first = true;
        for (Key x : keys) {
          if (first) {
            auto [parent, side] = attach_point(x);
            t.insert_first(x, parent, side);
            first = false;
          } else {
            // Shared-engine inserts start from the cursor; park it in the band.
            eng_->begin_operation();
            eng_->visit(eng_->find_unmetered(keys.front()));
            t.insert(x);
          }
        }
      }
    }
    for (NodeId id : eng_->live_nodes()) aux_of_[(*eng_)[id].key] = (*eng_)[id].domain;
  }

  SkipSplayTree(SkipSplayTree&&) noexcept = default;
  SkipSplayTree& operator=(SkipSplayTree&&) noexcept = default;

  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] Key n() const noexcept { return n_; }
  [[nodiscard]] std::size_t aux_count() const noexcept { return trees_.size(); }
  [[nodiscard]] const LayeredTree& aux(std::size_t i) const { return trees_.at(i); }
  [[nodiscard]] const Engine& engine() const noexcept { return *eng_; }

  /// Height of x in the perfectly balanced tree on {1..n}; leaves are 1.
  static int height_of(Key x) { return std::countr_zero(static_cast<std::uint64_t>(x)) + 1; }

  /// Auxiliary tree id of x, fixed at construction.
  [[nodiscard]] std::uint32_t aux_of(Key x) const {
    check_key(x);
    return aux_of_.at(x);
  }

  /// Key -> auxiliary tree id for every key, read from the live nodes.
  [[nodiscard]] std::map<Key, std::uint32_t> aux_snapshot() const {
    std::map<Key, std::uint32_t> out;
    for (NodeId id : eng_->live_nodes()) out[(*eng_)[id].key] = (*eng_)[id].domain;
    return out;
  }

  /// Descends to x, searches for it inside its auxiliary tree, then hops to
  /// the global parent of that auxiliary tree's root and searches for the
  /// parent in its own auxiliary tree, until the top tree has been searched.
  /// Returns the visits spent.
  std::uint64_t access(Key x) {
    check_key(x);
    const std::uint64_t before = eng_->visits();
    eng_->begin_operation();
    SearchResult r = eng_->search_from_root(x);
    LWS_CHECK(r.found, "universe key missing from the tree");
    NodeId cur = r.node;
    while (true) {
      const std::uint32_t dom = (*eng_)[cur].domain;
      trees_[dom].search_node(cur, (*eng_)[cur].layer);
      NodeId root = eng_->go_to_domain_root(dom);
      NodeId parent = (*eng_)[root].parent;
      if (parent == kNil) break;
      eng_->visit(parent);
      cur = parent;
    }
    return eng_->visits() - before;
  }

  /// Two consecutive accesses to x; the combined cost.
  std::uint64_t access_doubled(Key x) {
    std::uint64_t c = access(x);
    return c + access(x);
  }

  [[nodiscard]] VerifyReport verify() const {
    VerifyReport rep = verify_bst(*eng_);
    for (const auto& t : trees_) rep.merge(verify_layered(*eng_, t.root_unmetered(), t.domain()));
    return rep;
  }

 private:
  void check_key(Key x) const {
    if (x < 1 || x > n_) throw KeyError("key " + std::to_string(x) + " outside 1.." + std::to_string(n_));
  }

  // Nil slot where a fresh key would hang, found by an unmetered descent.
  std::pair<NodeId, Dir> attach_point(Key x) const {
    NodeId cur = eng_->root();
    if (cur == kNil) return {kNil, Dir::left};
    while (true) {
      const Dir d = x < (*eng_)[cur].key ? Dir::left : Dir::right;
      NodeId c = eng_->child(cur, d);
      if (c == kNil) return {cur, d};
      cur = c;
    }
  }

  std::unique_ptr<Engine> eng_;
  int k_;
  int height_ = 0;
  Key n_ = 0;
  std::vector<LayeredTree> trees_;
  std::map<Key, std::uint32_t> aux_of_;
};

}  // namespace lws
