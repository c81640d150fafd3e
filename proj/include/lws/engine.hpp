#pragma once

// Node storage and the single-cursor access machinery of the pointer-based
// BST model. Every structure in this library manipulates its tree through an
// Engine; the visit counter is the access cost.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lws/types.hpp"

namespace lws {

/// Layer count and size of the deepest layer. Lives on the root of a tree
/// (or of an auxiliary tree, when several trees share one engine).
struct RootHeader {
  int layers = 0;
  std::uint64_t size_last = 0;

  friend bool operator==(const RootHeader&, const RootHeader&) = default;
};

struct NodeRecord {
  Key key = 0;
  NodeId parent = kNil;
  NodeId left = kNil;
  NodeId right = kNil;
  Color color = Color::black;
  std::uint8_t layer = 1;
  // Which tree the node belongs to when an engine hosts nested trees.
  std::uint32_t domain = 0;
  std::optional<Key> older;
  std::optional<Key> younger;
  std::optional<Key> nextlayer;
  std::optional<RootHeader> header;
};

struct SearchResult {
  NodeId node = kNil;  // hit, or the last node reached on a miss
  bool found = false;
};

class Engine {
 public:
  Engine() = default;

  // -- storage ---------------------------------------------------------------

  NodeId allocate(Key key, std::uint32_t domain = 0) {
    NodeRecord rec;
    rec.key = key;
    rec.domain = domain;
    if (!free_.empty()) {
      NodeId id = free_.back();
      free_.pop_back();
      nodes_[id] = rec;
      live_[id] = true;
      ++size_;
      return id;
    }
    nodes_.push_back(rec);
    live_.push_back(true);
    ++size_;
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void release(NodeId id) {
    LWS_CHECK(valid(id), "release of dead node");
    if (cursor_ == id) cursor_ = nodes_[id].parent;
    if (root_ == id) root_ = kNil;
    live_[id] = false;
    free_.push_back(id);
    --size_;
  }

  [[nodiscard]] bool valid(NodeId id) const noexcept {
    return id != kNil && id < nodes_.size() && live_[id];
  }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool empty() const noexcept { return root_ == kNil; }

  NodeRecord& operator[](NodeId id) { return nodes_[id]; }
  const NodeRecord& operator[](NodeId id) const { return nodes_[id]; }

  [[nodiscard]] NodeId root() const noexcept { return root_; }
  void set_root(NodeId id) noexcept {
    root_ = id;
    if (id != kNil) nodes_[id].parent = kNil;
  }

  // -- links -----------------------------------------------------------------

  [[nodiscard]] NodeId child(NodeId id, Dir d) const {
    return d == Dir::left ? nodes_[id].left : nodes_[id].right;
  }

  // Links child under parent on side d (child may be nil).
  void set_child(NodeId parent, Dir d, NodeId child) {
    (d == Dir::left ? nodes_[parent].left : nodes_[parent].right) = child;
    if (child != kNil) nodes_[child].parent = parent;
  }

  [[nodiscard]] Dir side_of(NodeId id) const {
    NodeId p = nodes_[id].parent;
    return nodes_[p].left == id ? Dir::left : Dir::right;
  }

  // `nu` takes the place of `old` under old's parent (or as the global
  // root). The root header, if any, follows the position.
  void replace_in_parent(NodeId old, NodeId nu) {
    NodeId p = nodes_[old].parent;
    if (p == kNil) {
      if (root_ == old) root_ = nu;
      if (nu != kNil) nodes_[nu].parent = kNil;
    } else {
      set_child(p, side_of(old), nu);
    }
    if (nodes_[old].header && nu != kNil) {
      nodes_[nu].header = std::move(nodes_[old].header);
      nodes_[old].header.reset();
    }
  }

  /// Rotation about x. `d` names the direction x moves: Dir::left lifts
  /// x's right child. Both nodes must share domain and layer.
  void rotate(NodeId x, Dir d) {
    NodeId y = child(x, opposite(d));
    LWS_CHECK(y != kNil, "rotate without a child to lift");
    LWS_CHECK(nodes_[x].layer == nodes_[y].layer && nodes_[x].domain == nodes_[y].domain,
              "rotation across a layer boundary");
    visit(x);
    visit(nodes_[x].parent);
    visit(y);
    NodeId b = child(y, d);
    visit(b);
    replace_in_parent(x, y);
    set_child(x, opposite(d), b);
    set_child(y, d, x);
  }

  // -- cursor ----------------------------------------------------------------

  /// Lifts the cursor off the tree; the next root walk pays the root entry.
  void begin_operation() noexcept { cursor_ = kNil; }

  void visit(NodeId id) noexcept {
    if (id == kNil || id == cursor_) return;
    ++visits_;
    cursor_ = id;
  }

  [[nodiscard]] NodeId cursor() const noexcept { return cursor_; }
  [[nodiscard]] std::uint64_t visits() const noexcept { return visits_; }

  NodeId go_to_root() {
    if (root_ == kNil) return kNil;
    if (cursor_ == kNil || !valid(cursor_)) {
      cursor_ = kNil;
      visit(root_);
      return root_;
    }
    while (nodes_[cursor_].parent != kNil) visit(nodes_[cursor_].parent);
    return cursor_;
  }

  /// Walks the cursor up to the root of the given domain. The cursor must
  /// sit inside that domain or inside a tree hanging below it.
  NodeId go_to_domain_root(std::uint32_t domain) {
    if (cursor_ == kNil || !valid(cursor_)) return go_to_root();
    while (true) {
      const NodeRecord& n = nodes_[cursor_];
      if (n.domain == domain && (n.parent == kNil || nodes_[n.parent].domain != domain)) {
        return cursor_;
      }
      LWS_CHECK(n.parent != kNil, "cursor is not below the requested domain");
      visit(n.parent);
    }
  }

  /// Plain descent from the cursor's current node, restricted to one domain.
  SearchResult descend(Key k, std::uint32_t domain) {
    NodeId cur = cursor_;
    if (cur == kNil) return {};
    while (true) {
      const NodeRecord& n = nodes_[cur];
      if (n.key == k) return {cur, true};
      NodeId next = k < n.key ? n.left : n.right;
      if (next == kNil || nodes_[next].domain != domain) return {cur, false};
      visit(next);
      cur = next;
    }
  }

  /// Search from the cursor for a key of the given domain: walk up until
  /// the current ancestor's key and the starting key bracket k (k then lies
  /// in that ancestor's subtree), or the domain root is reached, then
  /// descend.
  SearchResult finger_search(Key k, std::uint32_t domain) {
    NodeId cur = cursor_;
    if (cur == kNil || !valid(cur)) {
      go_to_root();
      cur = cursor_;
      while (cur != kNil && nodes_[cur].domain != domain) {
        cur = k < nodes_[cur].key ? nodes_[cur].left : nodes_[cur].right;
        visit(cur);
      }
      if (cur == kNil) return {};
    } else {
      const Key start = nodes_[cur].key;
      while (true) {
        const NodeRecord& n = nodes_[cur];
        if (n.domain == domain) {
          const bool bracketed = (start <= k && k <= n.key) || (n.key <= k && k <= start);
          if (bracketed || n.parent == kNil || nodes_[n.parent].domain != domain) break;
        }
        LWS_CHECK(n.parent != kNil, "cursor is not below the requested domain");
        visit(n.parent);
        cur = n.parent;
      }
    }
    return descend(k, domain);
  }

  /// Standard BST search starting at the global root, any domain.
  SearchResult search_from_root(Key k) {
    NodeId cur = go_to_root();
    if (cur == kNil) return {};
    while (true) {
      const NodeRecord& n = nodes_[cur];
      if (n.key == k) return {cur, true};
      NodeId next = k < n.key ? n.left : n.right;
      if (next == kNil) return {cur, false};
      visit(next);
      cur = next;
    }
  }

  // -- non-model helpers (tests, validators, reports) ------------------------

  [[nodiscard]] std::vector<Key> inorder_keys() const {
    std::vector<Key> out;
    out.reserve(size_);
    std::vector<NodeId> stack;
    NodeId cur = root_;
    while (cur != kNil || !stack.empty()) {
      while (cur != kNil) {
        stack.push_back(cur);
        cur = nodes_[cur].left;
      }
      cur = stack.back();
      stack.pop_back();
      out.push_back(nodes_[cur].key);
      cur = nodes_[cur].right;
    }
    return out;
  }

  [[nodiscard]] NodeId find_unmetered(Key k) const {
    NodeId cur = root_;
    while (cur != kNil && nodes_[cur].key != k) {
      cur = k < nodes_[cur].key ? nodes_[cur].left : nodes_[cur].right;
    }
    return cur;
  }

  [[nodiscard]] std::size_t depth_unmetered(NodeId id) const {
    std::size_t d = 0;
    while (nodes_[id].parent != kNil) {
      id = nodes_[id].parent;
      ++d;
    }
    return d;
  }

  // Every live node id, in storage order.
  [[nodiscard]] std::vector<NodeId> live_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (live_[i]) out.push_back(i);
    return out;
  }

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<bool> live_;
  std::vector<NodeId> free_;
  std::size_t size_ = 0;
  NodeId root_ = kNil;
  NodeId cursor_ = kNil;
  std::uint64_t visits_ = 0;
};

}  // namespace lws
