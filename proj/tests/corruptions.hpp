#pragma once

// Hand-made corruptions of a valid layered tree, each paired with the
// violation verify() must report for it.

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lws/lws_tree.hpp"
#include "lws/validate.hpp"

namespace lws::testing {

struct Expected {
  std::string invariant;
  std::optional<Key> witness;  // checked when set
  int layer = 0;               // checked when nonzero
};

struct Corruption {
  std::string name;
  std::function<Expected(LayeredTree&)> apply;
};

/// 300 keys with some searches mixed in: four layers, L_3 full.
inline LayeredTree corruption_fixture() {
  LayeredTree t;
  std::vector<Key> keys;
  for (Key k = 1; k <= 300; ++k) keys.push_back(k);
  std::mt19937_64 rng(7);
  std::shuffle(keys.begin(), keys.end(), rng);
  for (Key k : keys) t.insert(k);
  for (int i = 0; i < 200; ++i) t.search(keys[rng() % keys.size()]);
  return t;
}

inline bool detected(const VerifyReport& rep, const Expected& e) {
  for (const auto& v : rep.violations) {
    if (v.invariant != e.invariant) continue;
    if (e.witness && v.witness != e.witness) continue;
    if (e.layer != 0 && v.layer != e.layer) continue;
    return true;
  }
  return false;
}

namespace detail {

inline NodeRecord& rec(LayeredTree& t, Key k) { return t.engine()[t.engine().find_unmetered(k)]; }

inline Key key_of(LayeredTree& t, NodeId n) { return t.engine()[n].key; }

inline bool in_layer(LayeredTree& t, NodeId n, int j) {
  return n != kNil && t.engine()[n].domain == t.domain() && t.engine()[n].layer == j;
}

// First member of L_j (in traversal order) satisfying pred.
template <class Pred>
NodeId pick(LayeredTree& t, int j, Pred pred) {
  for (NodeId n : t.domain_nodes_unmetered())
    if (t.engine()[n].layer == j && pred(n)) return n;
  throw std::logic_error("fixture has no node of the required shape in layer " + std::to_string(j));
}

inline std::vector<Key> order(LayeredTree& t, int j) {
  return t.layer_orders_unmetered().at(static_cast<std::size_t>(j - 1));
}

}  // namespace detail

inline std::vector<Corruption> corruption_catalogue() {
  using namespace detail;
  std::vector<Corruption> out;
  auto add = [&](std::string name, std::function<Expected(LayeredTree&)> f) { out.push_back({std::move(name), std::move(f)}); };

  // Color flips.
  add("color: L3 subtree root turned red", [](LayeredTree& t) {
    NodeId n = pick(t, 3, [&](NodeId x) { return !in_layer(t, t.engine()[x].parent, 3); });
    t.engine()[n].color = Color::red;
    return Expected{"rb-root-color", key_of(t, n), 3};
  });
  add("color: black L3 node turned red", [](LayeredTree& t) {
    NodeId n = pick(t, 3, [&](NodeId x) {
      return t.engine()[x].color == Color::black && in_layer(t, t.engine()[x].parent, 3);
    });
    t.engine()[n].color = Color::red;
    return Expected{"rb-black-height", key_of(t, t.engine()[n].parent), 3};
  });
  add("color: red L3 node turned black", [](LayeredTree& t) {
    NodeId n = pick(t, 3, [&](NodeId x) { return t.engine()[x].color == Color::red; });
    t.engine()[n].color = Color::black;
    return Expected{"rb-black-height", key_of(t, t.engine()[n].parent), 3};
  });
  add("color: child of a red L3 node turned red", [](LayeredTree& t) {
    NodeId n = pick(t, 3, [&](NodeId x) {
      NodeId p = t.engine()[x].parent;
      return in_layer(t, p, 3) && t.engine()[p].color == Color::red;
    });
    t.engine()[n].color = Color::red;
    return Expected{"rb-red-red", key_of(t, n), 3};
  });
  add("color: tree root turned red", [](LayeredTree& t) {
    NodeId r = t.root_unmetered();
    t.engine()[r].color = Color::red;
    return Expected{"rb-root-color", key_of(t, r), 1};
  });

  // Layer labels.
  add("label: L1 parent and L2 child swapped", [](LayeredTree& t) {
    NodeId c = pick(t, 2, [&](NodeId x) { return in_layer(t, t.engine()[x].parent, 1); });
    NodeId p = t.engine()[c].parent;
    std::swap(t.engine()[c].layer, t.engine()[p].layer);
    return Expected{"layer-monotonicity", key_of(t, c), 1};
  });
  add("label: deepest node beyond the layer count", [](LayeredTree& t) {
    NodeId n = pick(t, 4, [](NodeId) { return true; });
    t.engine()[n].layer = 5;
    return Expected{"layer-label-range", key_of(t, n), 5};
  });
  add("label: L2 node labelled zero", [](LayeredTree& t) {
    NodeId n = pick(t, 2, [](NodeId) { return true; });
    t.engine()[n].layer = 0;
    return Expected{"layer-label-range", key_of(t, n), 0};
  });
  add("label: L3 node below an L3 parent relabelled 2", [](LayeredTree& t) {
    NodeId n = pick(t, 3, [&](NodeId x) { return in_layer(t, t.engine()[x].parent, 3); });
    t.engine()[n].layer = 2;
    return Expected{"layer-monotonicity", key_of(t, n), 2};
  });
  add("label: L2 node relabelled 3", [](LayeredTree& t) {
    NodeId n = pick(t, 2, [](NodeId) { return true; });
    t.engine()[n].layer = 3;
    return Expected{"layer-size", std::nullopt, 2};
  });

  // Queue fields.
  add("queue: older and younger swapped on one member", [](LayeredTree& t) {
    auto o = order(t, 3);
    auto& r = rec(t, o[5]);
    std::swap(r.older, r.younger);
    return Expected{"queue-backlink", o[5], 3};
  });
  add("queue: younger fields of two members swapped", [](LayeredTree& t) {
    auto o = order(t, 3);
    std::swap(rec(t, o[2]).younger, rec(t, o[4]).younger);
    return Expected{"queue-backlink", o[5], 3};
  });
  add("queue: interior member lost its older link", [](LayeredTree& t) {
    auto o = order(t, 3);
    rec(t, o[7]).older.reset();
    return Expected{"queue-ends", std::nullopt, 3};
  });
  add("queue: L2 end links swapped", [](LayeredTree& t) {
    auto o = order(t, 2);
    std::swap(rec(t, o.front()).nextlayer, rec(t, o.back()).nextlayer);
    return Expected{"nextlayer", o.front(), 2};
  });
  add("queue: interior member given a nextlayer key", [](LayeredTree& t) {
    auto o = order(t, 3);
    rec(t, o[10]).nextlayer = order(t, 4).front();
    return Expected{"nextlayer", o[10], 3};
  });
  add("queue: younger names a key in another layer", [](LayeredTree& t) {
    auto o = order(t, 3);
    rec(t, o[0]).younger = order(t, 2).front();
    return Expected{"queue-walk", o[0], 3};
  });
  add("queue: ends closed into a cycle", [](LayeredTree& t) {
    auto o = order(t, 3);
    rec(t, o.front()).older = o.back();
    rec(t, o.back()).younger = o.front();
    return Expected{"queue-ends", std::nullopt, 3};
  });

  // Root header.
  add("header: deepest layer size off by one", [](LayeredTree& t) {
    NodeId r = t.root_unmetered();
    t.engine()[r].header->size_last += 1;
    return Expected{"header-size", key_of(t, r), 4};
  });
  add("header: layer count zero", [](LayeredTree& t) {
    NodeId r = t.root_unmetered();
    t.engine()[r].header->layers = 0;
    return Expected{"header-layers", key_of(t, r), 0};
  });
  add("header: copy left below the root", [](LayeredTree& t) {
    NodeId r = t.root_unmetered();
    NodeId c = t.engine()[r].left;
    t.engine()[c].header = t.engine()[r].header;
    return Expected{"header-off-root", key_of(t, c), 0};
  });
  return out;
}

}  // namespace lws::testing
