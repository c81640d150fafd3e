#pragma once

// Red-black balancing confined to one layer-subtree: a maximal connected set
// of nodes sharing a domain and a layer label. Children outside the layer
// (absent, deeper label, or another domain) are black boundary leaves, and
// whatever hangs there is carried along untouched by every restructuring.

#include <optional>
#include <vector>

#include "lws/engine.hpp"

namespace lws {

class LayerSubtree {
 public:
  /// A detached red-black tree used while splitting or joining. `root` may
  /// be a boundary (nil or a node of another layer), meaning an empty tree
  /// that still carries the subtree hanging at its only leaf position.
  struct Fragment {
    NodeId root = kNil;
    int black_height = 0;
  };

  LayerSubtree(Engine& eng, std::uint32_t domain) : eng_(eng), domain_(domain) {}

  [[nodiscard]] bool in_layer(NodeId n, int layer) const {
    return n != kNil && eng_[n].domain == domain_ && eng_[n].layer == layer;
  }
  [[nodiscard]] bool is_red(NodeId n, int layer) const {
    return in_layer(n, layer) && eng_[n].color == Color::red;
  }
  [[nodiscard]] int layer_of(NodeId n) const { return eng_[n].layer; }

  /// RB-Insert-Fixup for a node just labeled into its layer with no in-layer
  /// children. Colors x itself. Returns true when the layer-subtree root had
  /// to be blackened from red (black height grew by one). `top`, when given,
  /// is kept pointing at the root of a detached fragment.
  bool insert_fixup(NodeId x, NodeId* top = nullptr) {
    const int j = layer_of(x);
    eng_.visit(x);
    eng_[x].color = Color::red;
    while (true) {
      NodeId p = eng_[x].parent;
      if (!in_layer(p, j)) {
        eng_[x].color = Color::black;
        return true;
      }
      eng_.visit(p);
      if (eng_[p].color == Color::black) return false;
      NodeId g = eng_[p].parent;
      LWS_CHECK(in_layer(g, j), "red layer-subtree root");
      eng_.visit(g);
      const Dir pd = eng_.side_of(p);
      NodeId u = eng_.child(g, opposite(pd));
      if (is_red(u, j)) {
        eng_.visit(u);
        eng_[p].color = Color::black;
        eng_[u].color = Color::black;
        eng_[g].color = Color::red;
        x = g;
        continue;
      }
      if (eng_.side_of(x) != pd) {
        eng_.rotate(p, pd);
        x = p;
        p = eng_[x].parent;
      }
      eng_[p].color = Color::black;
      eng_[g].color = Color::red;
      eng_.rotate(g, opposite(pd));
      if (top != nullptr && *top == g) *top = p;
      return false;
    }
  }

  /// RB-Delete-Fixup for a black-height deficit of one at child position
  /// (parent, d). The position may be empty or hold a deeper subtree.
  void delete_fixup(NodeId parent, Dir d) {
    LWS_CHECK(parent != kNil, "delete_fixup without a parent");
    const int j = layer_of(parent);
    LWS_CHECK(black_height_unmetered(eng_.child(parent, d), j) + 1 ==
                  black_height_unmetered(eng_.child(parent, opposite(d)), j),
              "delete_fixup called without a black-height deficit");
    NodeId p = parent;
    while (true) {
      eng_.visit(p);
      NodeId x = eng_.child(p, d);
      if (is_red(x, j)) {
        eng_.visit(x);
        eng_[x].color = Color::black;
        return;
      }
      NodeId w = eng_.child(p, opposite(d));
      LWS_CHECK(in_layer(w, j), "deficit without an in-layer sibling");
      eng_.visit(w);
      if (eng_[w].color == Color::red) {
        eng_[w].color = Color::black;
        eng_[p].color = Color::red;
        eng_.rotate(p, d);
        w = eng_.child(p, opposite(d));
        LWS_CHECK(in_layer(w, j), "deficit without an in-layer sibling");
        eng_.visit(w);
      }
      NodeId near = eng_.child(w, d);
      NodeId far = eng_.child(w, opposite(d));
      if (!is_red(near, j) && !is_red(far, j)) {
        eng_[w].color = Color::red;
        NodeId pp = eng_[p].parent;
        if (!in_layer(pp, j) || eng_[p].color == Color::red) {
          eng_.visit(p);
          eng_[p].color = Color::black;
          return;
        }
        d = eng_.side_of(p);
        p = pp;
        continue;
      }
      if (!is_red(far, j)) {
        eng_.visit(near);
        eng_[near].color = Color::black;
        eng_[w].color = Color::red;
        eng_.rotate(w, opposite(d));
        w = eng_.child(p, opposite(d));
        far = eng_.child(w, opposite(d));
      }
      eng_.visit(w);
      eng_[w].color = eng_[p].color;
      eng_[p].color = Color::black;
      eng_.visit(far);
      eng_[far].color = Color::black;
      eng_.rotate(p, d);
      return;
    }
  }

  /// Moves x to the root of its layer-subtree. Each side of x is left as an
  /// independently valid red-black tree; the whole need not be balanced.
  void split(NodeId x) {
    const int j = layer_of(x);
    eng_.visit(x);
    std::vector<NodeId> path;
    std::vector<Color> colors;  // original colors, x first
    colors.push_back(eng_[x].color);
    for (NodeId cur = x; in_layer(eng_[cur].parent, j);) {
      cur = eng_[cur].parent;
      eng_.visit(cur);
      path.push_back(cur);
      colors.push_back(eng_[cur].color);
    }
    if (path.empty()) return;

    const NodeId top = path.back();
    const Anchor anchor = detach(top);

    const int h = black_height(eng_[x].left, j);
    eng_.visit(x);
    Fragment lo{eng_[x].left, h};
    Fragment hi{eng_[x].right, h};
    NodeId below = x;
    int below_children_bh = h;
    for (std::size_t i = 0; i < path.size(); ++i) {
      NodeId a = path[i];
      eng_.visit(a);
      const Dir d = eng_[a].left == below ? Dir::left : Dir::right;
      const int a_children_bh = below_children_bh + (colors[i] == Color::black ? 1 : 0);
      if (d == Dir::right) {
        lo = join3(Fragment{eng_[a].left, a_children_bh}, a, lo, j);
      } else {
        hi = join3(hi, a, Fragment{eng_[a].right, a_children_bh}, j);
      }
      below = a;
      below_children_bh = a_children_bh;
    }
    eng_.visit(x);
    detach_fragment_root(lo.root);
    detach_fragment_root(hi.root);
    eng_.set_child(x, Dir::left, lo.root);
    eng_.set_child(x, Dir::right, hi.root);
    eng_[x].color = Color::black;
    reattach(anchor, x);
  }

  /// Rebuilds x and its same-layer children into one red-black tree. x must
  /// be the root of its layer-subtree; its children's sides may differ in
  /// black height. With no same-layer child, x becomes a black singleton.
  void join(NodeId x) {
    const int j = layer_of(x);
    eng_.visit(x);
    LWS_CHECK(!in_layer(eng_[x].parent, j), "join on a node that is not a layer-subtree root");
    const Anchor anchor = detach(x);
    Fragment a{eng_[x].left, black_height(eng_[x].left, j)};
    Fragment b{eng_[x].right, black_height(eng_[x].right, j)};
    Fragment res = join3(a, x, b, j);
    reattach(anchor, res.root);
  }

  /// Joins two detached fragments around m (a < m < b in key order).
  Fragment join3(Fragment a, NodeId m, Fragment b, int j) {
    eng_.visit(m);
    detach_fragment_root(a.root);
    detach_fragment_root(b.root);
    eng_[m].left = kNil;
    eng_[m].right = kNil;
    if (is_red(a.root, j)) {
      eng_.visit(a.root);
      eng_[a.root].color = Color::black;
      ++a.black_height;
    }
    if (is_red(b.root, j)) {
      eng_.visit(b.root);
      eng_[b.root].color = Color::black;
      ++b.black_height;
    }
    if (a.black_height == b.black_height) {
      eng_.set_child(m, Dir::left, a.root);
      eng_.set_child(m, Dir::right, b.root);
      eng_[m].color = Color::black;
      return {m, a.black_height + 1};
    }
    if (a.black_height > b.black_height) return graft(a, m, b, Dir::right, j);
    return graft(b, m, a, Dir::left, j);
  }

  /// Black nodes on the leftmost in-layer path from n to the boundary.
  int black_height(NodeId n, int j) {
    int h = 0;
    while (in_layer(n, j)) {
      eng_.visit(n);
      if (eng_[n].color == Color::black) ++h;
      n = eng_[n].left;
    }
    return h;
  }

  [[nodiscard]] int black_height_unmetered(NodeId n, int j) const {
    int h = 0;
    for (; in_layer(n, j); n = eng_[n].left)
      if (eng_[n].color == Color::black) ++h;
    return h;
  }

  /// Removes x from its layer's red-black structure and relabels it
  /// `new_layer`, leaving x in the tree at a boundary position of its old
  /// layer-subtree. When x has two same-layer children this is the
  /// successor splice: s takes x's place and x drops below the predecessor.
  void detach_to_boundary(NodeId x, int new_layer) {
    const int j = layer_of(x);
    eng_.visit(x);
    const bool has_left = in_layer(eng_[x].left, j);
    const bool has_right = in_layer(eng_[x].right, j);
    if (!has_left && !has_right) {
      NodeId p = eng_[x].parent;
      const bool deficit = in_layer(p, j) && eng_[x].color == Color::black;
      const Dir side = p != kNil ? eng_.side_of(x) : Dir::left;
      eng_[x].layer = static_cast<std::uint8_t>(new_layer);
      if (deficit) delete_fixup(p, side);
      return;
    }

    const Dir d = has_right ? Dir::right : Dir::left;
    const Dir o = opposite(d);
    NodeId s = eng_.child(x, d);
    eng_.visit(s);
    while (in_layer(eng_.child(s, o), j)) {
      s = eng_.child(s, o);
      eng_.visit(s);
    }
    NodeId pred = kNil;
    if (in_layer(eng_.child(x, o), j)) {
      pred = eng_.child(x, o);
      eng_.visit(pred);
      while (in_layer(eng_.child(pred, d), j)) {
        pred = eng_.child(pred, d);
        eng_.visit(pred);
      }
    }

    const NodeId s_boundary = eng_.child(s, o);
    const NodeId s_other = eng_.child(s, d);
    const Color s_color = eng_[s].color;
    const NodeId x_o = eng_.child(x, o);
    NodeId fix_parent;
    Dir fix_dir;
    eng_.visit(x);
    if (s == eng_.child(x, d)) {
      fix_parent = s;
      fix_dir = d;
    } else {
      NodeId sp = eng_[s].parent;
      eng_.visit(sp);
      eng_.set_child(sp, o, s_other);
      eng_.set_child(s, d, eng_.child(x, d));
      fix_parent = sp;
      fix_dir = o;
    }
    eng_.visit(x);
    eng_.replace_in_parent(x, s);
    eng_.visit(s);
    eng_[s].color = eng_[x].color;
    if (pred != kNil) {
      const NodeId pred_boundary = eng_.child(pred, d);
      eng_.set_child(s, o, x_o);
      eng_.visit(pred);
      eng_.set_child(pred, d, x);
      eng_.set_child(x, o, pred_boundary);
    } else {
      eng_.set_child(s, o, x);
      eng_.set_child(x, o, x_o);
    }
    eng_.set_child(x, d, s_boundary);
    eng_[x].layer = static_cast<std::uint8_t>(new_layer);
    if (s_color == Color::black) delete_fixup(fix_parent, fix_dir);
  }

 private:
  struct Anchor {
    NodeId parent = kNil;
    Dir side = Dir::left;
    std::optional<RootHeader> header;
  };

  Anchor detach(NodeId top) {
    Anchor a;
    a.parent = eng_[top].parent;
    if (a.parent != kNil) {
      a.side = eng_.side_of(top);
      eng_.set_child(a.parent, a.side, kNil);
    } else {
      LWS_CHECK(eng_.root() == top, "detached fragment passed as a layer-subtree");
      eng_.set_root(kNil);
    }
    eng_[top].parent = kNil;
    a.header = std::move(eng_[top].header);
    eng_[top].header.reset();
    return a;
  }

  void reattach(const Anchor& a, NodeId top) {
    if (a.parent != kNil) {
      eng_.visit(a.parent);
      eng_.set_child(a.parent, a.side, top);
    } else {
      eng_.set_root(top);
    }
    if (a.header) eng_[top].header = a.header;
  }

  void detach_fragment_root(NodeId r) {
    if (r != kNil) eng_[r].parent = kNil;
  }

  // Hangs m with `small` on the `spine` side of `big`, at the first black
  // node (or boundary) whose black height matches small's.
  Fragment graft(Fragment big, NodeId m, Fragment small, Dir spine, int j) {
    NodeId y = big.root;
    NodeId yp = kNil;
    int hy = big.black_height;
    eng_.visit(y);
    while (!(hy == small.black_height && (!in_layer(y, j) || eng_[y].color == Color::black))) {
      LWS_CHECK(in_layer(y, j), "black height bookkeeping out of sync");
      if (eng_[y].color == Color::black) --hy;
      yp = y;
      y = eng_.child(y, spine);
      eng_.visit(y);
    }
    LWS_CHECK(yp != kNil, "graft point at fragment root");
    eng_.visit(yp);
    eng_.set_child(yp, spine, m);
    eng_.set_child(m, opposite(spine), y);
    eng_.set_child(m, spine, small.root);
    NodeId top = big.root;
    const bool grew = insert_fixup(m, &top);
    return {top, big.black_height + (grew ? 1 : 0)};
  }

  Engine& eng_;
  std::uint32_t domain_;
};

}  // namespace lws
