#pragma once

// Plain red-black tree on the same engine and cost model, for comparison.

#include <string>

#include "lws/engine.hpp"
#include "lws/layer_subtree.hpp"

namespace lws {

class RedBlackTree {
 public:
  bool search(Key k) {
    eng_.begin_operation();
    return eng_.search_from_root(k).found;
  }

  void insert(Key k) {
    eng_.begin_operation();
    SearchResult r = eng_.search_from_root(k);
    if (r.found) throw KeyError("duplicate key " + std::to_string(k));
    NodeId x = eng_.allocate(k);
    if (r.node == kNil) {
      eng_.set_root(x);
    } else {
      eng_.set_child(r.node, k < eng_[r.node].key ? Dir::left : Dir::right, x);
    }
    LayerSubtree(eng_, 0).insert_fixup(x);
  }

  void erase(Key k) {
    eng_.begin_operation();
    SearchResult r = eng_.search_from_root(k);
    if (!r.found) throw KeyError("key " + std::to_string(k) + " not present");
    NodeId x = r.node;
    // Splice x out of the red-black structure; it ends as a childless node
    // with a throwaway label, then gets unlinked.
    LayerSubtree(eng_, 0).detach_to_boundary(x, 2);
    LWS_CHECK(eng_[x].left == kNil && eng_[x].right == kNil, "spliced node kept children");
    NodeId p = eng_[x].parent;
    if (p == kNil) {
      eng_.set_root(kNil);
    } else {
      eng_.visit(p);
      eng_.set_child(p, eng_.side_of(x), kNil);
    }
    eng_.release(x);
  }

  [[nodiscard]] Engine& engine() noexcept { return eng_; }
  [[nodiscard]] const Engine& engine() const noexcept { return eng_; }
  [[nodiscard]] std::size_t size() const noexcept { return eng_.size(); }

 private:
  Engine eng_;
};

}  // namespace lws
