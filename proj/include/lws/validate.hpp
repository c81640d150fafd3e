#pragma once

// Unmetered invariant checks. Each violation names the invariant and a
// witness (a node key and/or a layer index) so a corrupted structure can be
// pinned down from the report alone.

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lws/engine.hpp"
#include "lws/lws_tree.hpp"

namespace lws {

struct Violation {
  std::string invariant;
  std::optional<Key> witness;
  int layer = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<Violation> violations;
  std::size_t checks = 0;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  [[nodiscard]] bool has(const std::string& invariant) const {
    for (const auto& v : violations)
      if (v.invariant == invariant) return true;
    return false;
  }
  [[nodiscard]] bool has(const std::string& invariant, Key witness) const {
    for (const auto& v : violations)
      if (v.invariant == invariant && v.witness == witness) return true;
    return false;
  }
  void add(std::string invariant, std::optional<Key> witness, int layer, std::string detail) {
    violations.push_back({std::move(invariant), witness, layer, std::move(detail)});
  }
  void merge(const VerifyReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    checks += other.checks;
  }
  [[nodiscard]] std::string to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) {
      os << v.invariant;
      if (v.witness) os << " key=" << *v.witness;
      if (v.layer != 0) os << " layer=" << v.layer;
      if (!v.detail.empty()) os << ": " << v.detail;
      os << '\n';
    }
    return os.str();
  }
};

/// Upper bound on the depth (edges from the tree root) of a node in L_j:
/// each layer-subtree on the way is a red-black tree of at most 2^(2^k)
/// nodes, hence of height at most 2*2^k + 2.
constexpr std::size_t depth_bound(int layer) {
  std::size_t sum = 0;
  for (int k = 1; k <= layer; ++k) sum += 2 * (std::size_t{1} << k) + 2;
  return sum;
}

/// Global symmetric order and parent-link consistency.
inline VerifyReport verify_bst(const Engine& eng) {
  VerifyReport rep;
  if (eng.root() == kNil) return rep;
  if (eng[eng.root()].parent != kNil) rep.add("parent-link", eng[eng.root()].key, 0, "root has a parent");
  std::vector<NodeId> stack;
  std::optional<Key> prev;
  NodeId cur = eng.root();
  while (cur != kNil || !stack.empty()) {
    while (cur != kNil) {
      stack.push_back(cur);
      for (NodeId c : {eng[cur].left, eng[cur].right}) {
        if (c != kNil && eng[c].parent != cur) rep.add("parent-link", eng[c].key, 0, "child's parent link does not point back");
      }
      cur = eng[cur].left;
    }
    cur = stack.back();
    stack.pop_back();
    ++rep.checks;
    if (prev && !(*prev < eng[cur].key)) rep.add("bst-order", eng[cur].key, 0, "in-order sequence not increasing");
    prev = eng[cur].key;
    cur = eng[cur].right;
  }
  return rep;
}

/// Every layered-tree invariant for the tree of `domain` rooted at `root`.
inline VerifyReport verify_layered(const Engine& eng, NodeId root, std::uint32_t domain) {
  VerifyReport rep;
  if (root == kNil) return rep;
  auto in_domain = [&](NodeId n) { return n != kNil && eng[n].domain == domain; };

  // Gather members with their depth below the tree root.
  std::vector<std::pair<NodeId, std::size_t>> members;
  {
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto [n, d] = stack.back();
      stack.pop_back();
      members.emplace_back(n, d);
      for (NodeId c : {eng[n].left, eng[n].right})
        if (in_domain(c)) stack.emplace_back(c, d + 1);
    }
  }

  // Header.
  const auto& hdr = eng[root].header;
  if (!hdr) {
    rep.add("header-missing", eng[root].key, 0, "root carries no layer header");
    return rep;
  }
  for (auto [n, d] : members) {
    if (n != root && eng[n].header) rep.add("header-off-root", eng[n].key, 0, "header stored below the root");
  }
  const int t = hdr->layers;
  if (t < 1 || t > kMaxLayers) {
    rep.add("header-layers", eng[root].key, t, "layer count out of range");
    return rep;
  }

  // Labels, monotonicity, depth, per-layer membership.
  std::map<int, std::vector<NodeId>> by_layer;
  std::unordered_map<Key, NodeId> by_key;
  for (auto [n, d] : members) {
    ++rep.checks;
    const int j = eng[n].layer;
    by_key[eng[n].key] = n;
    by_layer[j].push_back(n);
    if (j < 1 || j > t) rep.add("layer-label-range", eng[n].key, j, "label outside 1..t");
    NodeId p = eng[n].parent;
    if (in_domain(p) && eng[p].layer > j) {
      rep.add("layer-monotonicity", eng[n].key, j, "parent has a larger layer label");
    }
    if (j >= 1 && j <= kMaxLayers && d > depth_bound(j)) {
      rep.add("depth-bound", eng[n].key, j, "depth " + std::to_string(d) + " exceeds " + std::to_string(depth_bound(j)));
    }
  }

  // Layer sizes against the header.
  for (int j = 1; j <= t; ++j) {
    const std::uint64_t have = by_layer.count(j) ? by_layer[j].size() : 0;
    if (j < t && have != layer_capacity(j)) {
      rep.add("layer-size", std::nullopt, j, "holds " + std::to_string(have) + ", expected " + std::to_string(layer_capacity(j)));
    }
    if (j == t) {
      if (have < 1 || have > layer_capacity(t)) rep.add("layer-size", std::nullopt, j, "deepest layer size out of range");
      if (have != hdr->size_last) {
        rep.add("header-size", eng[root].key, j, "header says " + std::to_string(hdr->size_last) + ", layer holds " + std::to_string(have));
      }
    }
  }

  // Red-black shape of each layer-subtree.
  auto same_layer = [&](NodeId c, int j) { return in_domain(c) && eng[c].layer == j; };
  auto rb = [&](auto&& self, NodeId n) -> int {
    const int j = eng[n].layer;
    int hs[2];
    int i = 0;
    for (NodeId c : {eng[n].left, eng[n].right}) {
      if (same_layer(c, j)) {
        if (eng[n].color == Color::red && eng[c].color == Color::red) {
          rep.add("rb-red-red", eng[c].key, j, "red node with a red parent");
        }
        hs[i] = self(self, c);
      } else {
        hs[i] = 0;
      }
      ++i;
    }
    if (hs[0] != hs[1]) rep.add("rb-black-height", eng[n].key, j, "unequal black heights below");
    return std::max(hs[0], hs[1]) + (eng[n].color == Color::black ? 1 : 0);
  };
  for (auto [n, d] : members) {
    NodeId p = eng[n].parent;
    if (!same_layer(p, eng[n].layer)) {
      ++rep.checks;
      if (eng[n].color != Color::black) rep.add("rb-root-color", eng[n].key, eng[n].layer, "layer-subtree root is red");
      rb(rb, n);
    }
  }

  // Implicit queues.
  struct Ends {
    NodeId oldest = kNil;
    NodeId youngest = kNil;
  };
  std::map<int, Ends> ends;
  for (auto& [j, nodes] : by_layer) {
    Ends e;
    int n_oldest = 0;
    int n_youngest = 0;
    for (NodeId n : nodes) {
      if (!eng[n].older) {
        ++n_oldest;
        e.oldest = n;
      }
      if (!eng[n].younger) {
        ++n_youngest;
        e.youngest = n;
      }
    }
    if (n_oldest != 1 || n_youngest != 1) {
      NodeId w = n_oldest != 1 ? (e.oldest != kNil ? e.oldest : nodes.front())
                               : (e.youngest != kNil ? e.youngest : nodes.front());
      rep.add("queue-ends", eng[w].key, j,
              std::to_string(n_oldest) + " oldest and " + std::to_string(n_youngest) + " youngest members");
      continue;
    }
    ends[j] = e;
    // Walk oldest -> youngest.
    std::size_t steps = 1;
    NodeId cur = e.oldest;
    bool broken = false;
    while (eng[cur].younger) {
      auto it = by_key.find(*eng[cur].younger);
      if (it == by_key.end() || eng[it->second].layer != j) {
        rep.add("queue-walk", eng[cur].key, j, "younger names a key outside the layer");
        broken = true;
        break;
      }
      NodeId nx = it->second;
      if (eng[nx].older != eng[cur].key) {
        rep.add("queue-backlink", eng[nx].key, j, "older does not point back");
        broken = true;
        break;
      }
      cur = nx;
      if (++steps > nodes.size()) {
        rep.add("queue-walk", eng[cur].key, j, "cycle in the recency queue");
        broken = true;
        break;
      }
    }
    if (!broken && (steps != nodes.size() || cur != e.youngest)) {
      rep.add("queue-walk", eng[cur].key, j, "walk covers " + std::to_string(steps) + " of " + std::to_string(nodes.size()));
    }
  }
  for (auto& [j, nodes] : by_layer) {
    if (!ends.count(j)) continue;
    const Ends e = ends[j];
    std::optional<Key> next_oldest;
    std::optional<Key> next_youngest;
    if (ends.count(j + 1)) {
      next_oldest = eng[ends[j + 1].oldest].key;
      next_youngest = eng[ends[j + 1].youngest].key;
    }
    for (NodeId n : nodes) {
      ++rep.checks;
      const auto& nl = eng[n].nextlayer;
      if (n == e.oldest && n == e.youngest) {
        if (nl != next_oldest || next_oldest != next_youngest) {
          rep.add("nextlayer", eng[n].key, j, "singleton layer's link does not name the next layer");
        }
      } else if (n == e.oldest) {
        if (nl != next_oldest) rep.add("nextlayer", eng[n].key, j, "oldest does not name the next layer's oldest");
      } else if (n == e.youngest) {
        if (nl != next_youngest) rep.add("nextlayer", eng[n].key, j, "youngest does not name the next layer's youngest");
      } else if (nl) {
        rep.add("nextlayer", eng[n].key, j, "interior queue member carries a nextlayer key");
      }
    }
  }
  return rep;
}

inline VerifyReport verify(const LayeredTree& tree) {
  VerifyReport rep = verify_bst(tree.engine());
  rep.merge(verify_layered(tree.engine(), tree.root_unmetered(), tree.domain()));
  return rep;
}

}  // namespace lws
