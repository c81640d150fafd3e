#pragma once

// Layered working-set tree: a single binary search tree whose nodes are
// labeled into layers L_1..L_t, L_j holding exactly 2^(2^j) keys for j < t.
// Each layer-subtree is an independent red-black tree, and each layer keeps
// an implicit recency queue in per-node key fields (older / younger /
// nextlayer). Searching for a key found in L_j costs O(2^j) node visits,
// which is O(lg w) for its working-set number w.

#include <algorithm>
#include <array>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lws/engine.hpp"
#include "lws/layer_subtree.hpp"

namespace lws {

/// 2^(2^j), for 1 <= j <= kMaxLayers.
inline std::uint64_t layer_capacity(int j) {
  if (j < 1 || j > kMaxLayers) {
    throw CapacityError("layer index " + std::to_string(j) + " outside 1.." +
                        std::to_string(kMaxLayers));
  }
  return std::uint64_t{1} << (std::uint64_t{1} << j);
}

class LayeredTree {
 public:
  /// Standalone tree owning its engine.
  LayeredTree() : owned_(std::make_unique<Engine>()), eng_(owned_.get()), standalone_(true) {}

  /// A tree living inside a shared engine under `domain`; its root hangs
  /// below nodes of other domains. Operations expect the cursor to sit at or
  /// below one of this tree's nodes.
  LayeredTree(Engine& shared, std::uint32_t domain)
      : eng_(&shared), domain_(domain), standalone_(false) {}

  LayeredTree(LayeredTree&&) noexcept = default;
  LayeredTree& operator=(LayeredTree&&) noexcept = default;

  [[nodiscard]] Engine& engine() noexcept { return *eng_; }
  [[nodiscard]] const Engine& engine() const noexcept { return *eng_; }
  [[nodiscard]] std::uint32_t domain() const noexcept { return domain_; }

  // -- public dictionary operations -----------------------------------------

  /// Returns whether k is present. A hit in L_j lifts k to the front of L_1
  /// and pushes one element down each of L_1..L_{j-1}. A miss changes nothing.
  bool search(Key k) {
    Scope scope(*this);
    begin();
    last_layer_found_ = 0;
    NodeId root = eng_->go_to_domain_root(domain_);
    if (root == kNil) return false;
    SearchResult r = eng_->descend(k, domain_);
    if (!r.found) return false;
    const int j = (*eng_)[r.node].layer;
    last_layer_found_ = j;
    search_node(r.node, j);
    return true;
  }

  void insert(Key k) {
    Scope scope(*this);
    begin();
    NodeId root = eng_->go_to_domain_root(domain_);
    if (root == kNil) {
      LWS_CHECK(standalone_, "empty shared-engine tree needs insert_first");
      NodeId x = eng_->allocate(k, domain_);
      eng_->set_root(x);
      eng_->visit(x);
      make_singleton_root(x);
      return;
    }
    RootHeader h = header_at(root);
    SearchResult r = eng_->descend(k, domain_);
    if (r.found) throw KeyError("duplicate key " + std::to_string(k));
    const int t_old = h.layers;
    const bool grow = h.size_last == layer_capacity(t_old);
    if (grow && t_old == kMaxLayers) throw CapacityError("layered tree is full");

    const NodeId leaf = r.node;
    const Dir side = k < (*eng_)[leaf].key ? Dir::left : Dir::right;
    LWS_CHECK(eng_->child(leaf, side) == kNil, "insert position is occupied by another tree");
    NodeId x = eng_->allocate(k, domain_);
    (*eng_)[x].layer = static_cast<std::uint8_t>(t_old + 1);
    (*eng_)[x].color = Color::black;
    eng_->set_child(leaf, side, x);
    eng_->visit(x);
    hint_ = x;

    root = eng_->go_to_domain_root(domain_);
    RootHeader& hdr = *(*eng_)[root].header;
    if (grow) {
      hdr.layers = t_old + 1;
      hdr.size_last = 1;
    } else {
      ++hdr.size_last;
    }
    const int t_new = hdr.layers;
    relink(k, std::nullopt, t_old + 1);
    search_node(find(k), std::min(t_old + 1, t_new));
  }

  /// Attaches the first key of an empty shared-engine tree below `parent`
  /// (nil parent: as the engine's root).
  void insert_first(Key k, NodeId parent, Dir side) {
    LWS_CHECK(!standalone_, "insert_first is for shared-engine trees");
    NodeId x = eng_->allocate(k, domain_);
    if (parent == kNil) {
      LWS_CHECK(eng_->empty(), "attach position occupied");
      eng_->set_root(x);
    } else {
      LWS_CHECK(eng_->child(parent, side) == kNil, "attach position occupied");
      eng_->set_child(parent, side, x);
    }
    eng_->visit(x);
    make_singleton_root(x);
  }

  void erase(Key k) {
    Scope scope(*this);
    begin();
    NodeId root = eng_->go_to_domain_root(domain_);
    if (root == kNil) throw KeyError("key " + std::to_string(k) + " not present");
    const RootHeader h = header_at(root);
    SearchResult r = eng_->descend(k, domain_);
    if (!r.found) throw KeyError("key " + std::to_string(k) + " not present");
    const int j = (*eng_)[r.node].layer;
    last_layer_found_ = j;
    const int t = h.layers;

    for (int m = j; m <= t; ++m) move_down(find(k));
    relink(k, t + 1, std::nullopt);
    NodeId x = find(k);
    LWS_CHECK((*eng_)[x].left == kNil && (*eng_)[x].right == kNil,
              "element in the temporary layer is not a leaf");
    NodeId p = (*eng_)[x].parent;
    if (p == kNil) {
      eng_->set_root(kNil);
    } else {
      eng_->visit(p);
      eng_->set_child(p, eng_->side_of(x), kNil);
    }
    if (hint_ == x) hint_ = p;
    pending_.erase(k);
    eng_->release(x);
    if (p == kNil) return;  // tree is now empty

    for (int m = t - 1; m >= j; --m) move_up(find(youngest_in_layer(m + 1)));

    root = eng_->go_to_domain_root(domain_);
    RootHeader& hdr = *(*eng_)[root].header;
    if (--hdr.size_last == 0) {
      --hdr.layers;
      LWS_CHECK(hdr.layers >= 1, "non-empty tree with zero layers");
      hdr.size_last = layer_capacity(hdr.layers);
    }
  }

  /// Runs the post-descent part of a search on a node the cursor has
  /// already reached: lift x to L_1, then push the oldest element of each
  /// layer below `stop` down by one.
  void search_node(NodeId x, int stop) {
    Scope scope(*this);
    const Key k = (*eng_)[x].key;
    const int j = (*eng_)[x].layer;
    if (j == 1) {
      // Re-appending the youngest element changes nothing.
      if (fields(x).younger) relink(k, 1, 1);
    } else {
      // Passing through L_{j-1}..L_2 leaves their queues as they were, so
      // the queue fields move once and the layer labels one step at a time.
      relink(k, j, 1);
      for (int m = j; m >= 2; --m) lift(find(k));
    }
    for (int m = 1; m < stop; ++m) move_down(find(oldest_in_layer(m)));
  }

  // -- inter-layer operations -----------------------------------------------

  Key youngest_in_layer(int j) {
    Scope scope(*this);
    return layer_end(j, /*oldest=*/false);
  }
  Key oldest_in_layer(int j) {
    Scope scope(*this);
    return layer_end(j, /*oldest=*/true);
  }

  /// Moves x from L_j to L_{j-1}, as the youngest element there.
  void move_up(NodeId x) {
    Scope scope(*this);
    const int j = (*eng_)[x].layer;
    LWS_CHECK(j >= 2, "move_up from the first layer");
    const Key k = (*eng_)[x].key;
    relink(k, j, j - 1);
    lift(find(k));
  }

  /// Moves x from L_j to L_{j+1}, as the youngest element there.
  void move_down(NodeId x) {
    Scope scope(*this);
    const int j = (*eng_)[x].layer;
    if (j + 1 > kMaxLayers + 1) throw CapacityError("move_down below the deepest layer");
    const Key k = (*eng_)[x].key;
    relink(k, j, j + 1);
    x = find(k);
    LayerSubtree sub(*eng_, domain_);
    sub.detach_to_boundary(x, j + 1);
    sub.join(x);
  }

  // -- inspection -----------------------------------------------------------

  [[nodiscard]] int last_layer_found() const noexcept { return last_layer_found_; }

  /// Root of this tree, found without touching the cursor.
  [[nodiscard]] NodeId root_unmetered() const {
    if (standalone_) return eng_->root();
    NodeId n = hint_;
    if (n == kNil) return kNil;
    while ((*eng_)[n].parent != kNil && (*eng_)[(*eng_)[n].parent].domain == domain_)
      n = (*eng_)[n].parent;
    return n;
  }

  [[nodiscard]] std::optional<RootHeader> header() const {
    NodeId r = root_unmetered();
    if (r == kNil) return std::nullopt;
    return (*eng_)[r].header;
  }

  [[nodiscard]] std::size_t size() const {
    auto h = header();
    if (!h) return 0;
    std::size_t n = h->size_last;
    for (int j = 1; j < h->layers; ++j) n += layer_capacity(j);
    return n;
  }

  /// Per-layer recency order, oldest first, read straight from the fields.
  /// Index 0 is L_1. Members that the queue walk cannot reach are appended
  /// in key order so that broken queues still compare unequal.
  [[nodiscard]] std::vector<std::vector<Key>> layer_orders_unmetered() const {
    std::map<int, std::vector<NodeId>> by_layer;
    std::unordered_map<Key, NodeId> by_key;
    for (NodeId n : domain_nodes_unmetered()) {
      by_layer[(*eng_)[n].layer].push_back(n);
      by_key[(*eng_)[n].key] = n;
    }
    std::vector<std::vector<Key>> out;
    if (by_layer.empty()) return out;
    out.resize(static_cast<std::size_t>(by_layer.rbegin()->first));
    for (auto& [layer, members] : by_layer) {
      auto& seq = out[static_cast<std::size_t>(layer - 1)];
      std::vector<Key> keys;
      for (NodeId n : members) keys.push_back((*eng_)[n].key);
      std::sort(keys.begin(), keys.end());
      NodeId cur = kNil;
      for (NodeId n : members)
        if (!(*eng_)[n].older) cur = n;
      while (cur != kNil && seq.size() <= members.size()) {
        seq.push_back((*eng_)[cur].key);
        auto nx = (*eng_)[cur].younger;
        if (!nx) break;
        auto it = by_key.find(*nx);
        cur = it == by_key.end() || (*eng_)[it->second].layer != layer ? kNil : it->second;
      }
      if (seq.size() != members.size()) seq.insert(seq.end(), keys.begin(), keys.end());
    }
    return out;
  }

  [[nodiscard]] std::vector<NodeId> domain_nodes_unmetered() const {
    std::vector<NodeId> out;
    NodeId r = root_unmetered();
    if (r == kNil) return out;
    std::vector<NodeId> stack{r};
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      out.push_back(n);
      for (NodeId c : {(*eng_)[n].left, (*eng_)[n].right})
        if (c != kNil && (*eng_)[c].domain == domain_) stack.push_back(c);
    }
    return out;
  }

  /// Metered search from the cursor for a key known to be in this tree.
  NodeId find(Key k) {
    SearchResult r = eng_->finger_search(k, domain_);
    LWS_CHECK(r.found, "queue field names a key that is not in the tree: " + std::to_string(k));
    settle(r.node);
    return r.node;
  }

 private:
  struct Ends {
    Key oldest;
    Key youngest;
    friend bool operator==(const Ends&, const Ends&) = default;
  };
  using Boundaries = std::vector<std::optional<Ends>>;

  void begin() {
    if (standalone_) eng_->begin_operation();
  }

  void make_singleton_root(NodeId x) {
    NodeRecord& n = (*eng_)[x];
    n.layer = 1;
    n.color = Color::black;
    n.older.reset();
    n.younger.reset();
    n.nextlayer.reset();
    n.header = RootHeader{1, 1};
    hint_ = x;
  }

  RootHeader header_at(NodeId root) const {
    LWS_CHECK((*eng_)[root].header.has_value(), "root carries no header");
    return *(*eng_)[root].header;
  }

  // Scans the L_1 layer-subtree at the root for its queue ends, and reads
  // the layer count from the header while the cursor is at the root.
  std::optional<Ends> scan_first_layer() {
    NodeId root = eng_->go_to_domain_root(domain_);
    op_layers_ = header_at(root).layers;
    LayerSubtree sub(*eng_, domain_);
    if (!sub.in_layer(root, 1)) return std::nullopt;
    std::optional<Key> oldest;
    std::optional<Key> youngest;
    auto walk = [&](auto&& self, NodeId n) -> void {
      eng_->visit(n);
      const NodeRecord rec = fields(n);
      if (!rec.older) {
        LWS_CHECK(!oldest, "two oldest elements in L_1");
        oldest = rec.key;
      }
      if (!rec.younger) {
        LWS_CHECK(!youngest, "two youngest elements in L_1");
        youngest = rec.key;
      }
      for (NodeId c : {rec.left, rec.right}) {
        if (sub.in_layer(c, 1)) {
          self(self, c);
          eng_->visit(n);
        }
      }
    };
    walk(walk, root);
    LWS_CHECK(oldest && youngest, "L_1 queue has no ends");
    return Ends{*oldest, *youngest};
  }

  Key layer_end(int j, bool oldest) {
    LWS_CHECK(j >= 1, "layer index below 1");
    const auto& e = ends(j)[static_cast<std::size_t>(j)];
    LWS_CHECK(e.has_value(), "layer " + std::to_string(j) + " is empty");
    return oldest ? e->oldest : e->youngest;
  }

  // Queue ends known to the current operation, read from the tree on first
  // use and then kept up to date by relink. Holds at most kMaxLayers + 3
  // keys, like any other per-operation local state.
  Boundaries& ends(int upto) {
    if (!ends_) {
      ends_.emplace(2);
      (*ends_)[1] = scan_first_layer();
    }
    Boundaries& b = *ends_;
    const auto need = static_cast<std::size_t>(upto) + 2;
    if (b.size() >= need) return b;
    std::size_t m = b.size() - 1;  // last index already computed, possibly a placeholder
    b.resize(need);
    if (m < 2) m = 2;
    for (; m <= static_cast<std::size_t>(upto); ++m) {
      // Only a temporary layer lies past the header's count; relink treats
      // an element found there as its only member.
      if (m > static_cast<std::size_t>(op_layers_)) continue;
      const auto& above = b[m - 1];
      if (!above) continue;
      auto o = fields(find(above->oldest)).nextlayer;
      auto y = above->oldest == above->youngest ? o : fields(find(above->youngest)).nextlayer;
      if (!o && !y) continue;
      LWS_CHECK(o && y, "one-sided nextlayer link above layer " + std::to_string(m));
      b[m] = Ends{*o, *y};
    }
    return b;
  }

  // Per-operation state (queue ends, pending writes) lives between the
  // entry and exit of the outermost public call; pending writes are flushed
  // on a normal exit and dropped when an exception passes through.
  struct Scope {
    explicit Scope(LayeredTree& t) : tree(t), outer(!t.in_op_), exceptions(std::uncaught_exceptions()) {
      if (outer) {
        tree.in_op_ = true;
        tree.ends_.reset();
        tree.pending_.clear();
      }
    }
    ~Scope() noexcept(false) {
      if (!outer) return;
      struct Reset {
        LayeredTree& t;
        ~Reset() {
          t.in_op_ = false;
          t.ends_.reset();
          t.pending_.clear();
        }
      } reset{tree};
      if (std::uncaught_exceptions() == exceptions) tree.flush();
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    LayeredTree& tree;
    bool outer;
    int exceptions;
  };

  // Relabels x from L_j to L_{j-1}: splits the L_j subtree at x and joins
  // x into the L_{j-1} subtree above it. Queue fields are left alone.
  void lift(NodeId x) {
    const int j = (*eng_)[x].layer;
    LayerSubtree sub(*eng_, domain_);
    sub.split(x);
    (*eng_)[x].layer = static_cast<std::uint8_t>(j - 1);
    for (NodeId c : {(*eng_)[x].left, (*eng_)[x].right}) {
      if (sub.is_red(c, j)) {
        eng_->visit(c);
        (*eng_)[c].color = Color::black;
      }
    }
    eng_->visit(x);
    if (sub.in_layer((*eng_)[x].parent, j - 1)) {
      sub.insert_fixup(x);
    } else {
      (*eng_)[x].color = Color::black;
    }
  }

  // Pending field writes for one node; an empty outer optional leaves the
  // field as it is.
  struct Patch {
    std::optional<std::optional<Key>> older;
    std::optional<std::optional<Key>> younger;
    std::optional<std::optional<Key>> nextlayer;
  };

  static void apply(NodeRecord& r, const Patch& p) {
    if (p.older) r.older = *p.older;
    if (p.younger) r.younger = *p.younger;
    if (p.nextlayer) r.nextlayer = *p.nextlayer;
  }

  // Removes key xk from the queue of layer `src` (if given) and appends it
  // as the youngest of layer `dst` (if given), then repairs the nextlayer
  // links of every queue end that changed. Fields only; no restructuring.
  // Only x's own links are read; every other change is worked out from the
  // cached queue ends. Writes are held until the operation ends, so each
  // touched node is visited once however many relinks touch it.
  void relink(Key xk, std::optional<int> src, std::optional<int> dst) {
    const int top = std::max(src.value_or(0), dst.value_or(0)) + 1;
    Boundaries& b = ends(top);
    auto at = [&](int m) -> std::optional<Ends>& { return b[static_cast<std::size_t>(m)]; };

    NodeId x = find(xk);
    const std::optional<Key> o = fields(x).older;
    const std::optional<Key> y = fields(x).younger;
    if (src && !at(*src)) {
      LWS_CHECK(!o && !y, "element of an unreachable layer is not alone there");
      at(*src) = Ends{xk, xk};
    }
    const Boundaries old = b;

    auto& patches = pending_;
    if (src) {
      patches[xk] = Patch{std::optional<Key>{}, std::optional<Key>{}, std::optional<Key>{}};
      if (o) patches[*o].younger = y;
      if (y) patches[*y].older = o;
      if (!o && !y) {
        at(*src).reset();
      } else {
        if (!o) at(*src)->oldest = *y;
        if (!y) at(*src)->youngest = *o;
      }
    }
    if (dst) {
      std::optional<Key> prev;
      if (at(*dst)) prev = at(*dst)->youngest;
      if (prev) patches[*prev].younger = xk;
      patches[xk] = Patch{prev, std::optional<Key>{}, std::optional<Key>{}};
      if (at(*dst)) {
        at(*dst)->youngest = xk;
      } else {
        at(*dst) = Ends{xk, xk};
      }
    }

    std::vector<int> affected;
    for (auto m : {src, dst}) {
      if (!m) continue;
      affected.push_back(*m - 1);
      affected.push_back(*m);
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    // nextlayer values each queue end should carry, before and after.
    using Links = std::array<std::pair<std::optional<Key>, std::optional<Key>>, 2>;
    auto links = [](const std::optional<Ends>& layer, const std::optional<Ends>& next) {
      Links l{};
      if (!layer) return l;
      const std::optional<Key> to_oldest = next ? std::optional<Key>(next->oldest) : std::nullopt;
      const std::optional<Key> to_youngest = next ? std::optional<Key>(next->youngest) : std::nullopt;
      l[0] = {layer->oldest, to_oldest};
      if (layer->oldest != layer->youngest) l[1] = {layer->youngest, to_youngest};
      return l;
    };
    for (int m : affected) {
      if (m < 1) continue;
      const auto mi = static_cast<std::size_t>(m);
      const auto& now = b[mi];
      const auto& next = b[mi + 1];
      if (now && next && now->oldest == now->youngest) {
        LWS_CHECK(next->oldest == next->youngest, "singleton layer above a layer with several elements");
      }
      const Links before = links(old[mi], old[mi + 1]);
      const Links after = links(now, next);
      auto holder = [](const Links& l, Key k) -> const std::pair<std::optional<Key>, std::optional<Key>>* {
        for (const auto& e : l)
          if (e.first == k) return &e;
        return nullptr;
      };
      for (const auto& e : before) {
        if (!e.first || *e.first == xk || holder(after, *e.first)) continue;
        patches[*e.first].nextlayer = std::optional<Key>{};
      }
      for (const auto& e : after) {
        if (!e.first) continue;
        const auto* prev = holder(before, *e.first);
        if (*e.first != xk && prev && prev->second == e.second) continue;
        patches[*e.first].nextlayer = e.second;
      }
    }
    settle(x);  // the cursor has not left x
  }

  // Node fields as the current operation sees them: the stored record with
  // pending writes applied. The node itself must have been reached.
  [[nodiscard]] NodeRecord fields(NodeId n) const {
    NodeRecord r = (*eng_)[n];
    if (auto it = pending_.find(r.key); it != pending_.end()) apply(r, it->second);
    return r;
  }

  // Writes the pending changes of a node the cursor is at.
  void settle(NodeId n) {
    auto it = pending_.find((*eng_)[n].key);
    if (it == pending_.end()) return;
    apply((*eng_)[n], it->second);
    pending_.erase(it);
  }

  // Writes the remaining pending changes, visiting each node once in key
  // order.
  void flush() {
    while (!pending_.empty()) find(pending_.begin()->first);
  }

  std::unique_ptr<Engine> owned_;
  Engine* eng_;
  std::uint32_t domain_ = 0;
  bool standalone_ = true;
  NodeId hint_ = kNil;
  int last_layer_found_ = 0;
  std::optional<Boundaries> ends_;
  int op_layers_ = 0;  // header layer count, read with ends_
  std::map<Key, Patch> pending_;
  bool in_op_ = false;
};

}  // namespace lws
