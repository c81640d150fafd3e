#pragma once

// The working-set structure as a plain executable oracle (ordered sets plus
// recency queues per level, no cost model), and exact trackers for the
// working-set number and the unified bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lws/lws_tree.hpp"
#include "lws/types.hpp"

namespace lws {

/// log2(z + 2).
inline double lg(double z) { return std::log2(z + 2.0); }

class ReferenceStructure {
 public:
  /// Returns the 1-based level holding k, or 0.
  [[nodiscard]] int level_of(Key k) const {
    auto it = where_.find(k);
    return it == where_.end() ? 0 : it->second.level;
  }
  [[nodiscard]] int levels() const noexcept { return static_cast<int>(levels_.size()); }
  [[nodiscard]] std::size_t size() const noexcept { return where_.size(); }
  [[nodiscard]] std::size_t level_size(int j) const { return level(j).keys.size(); }

  /// Returns the level where k was found (0 on a miss). A hit moves k to
  /// level 1 as its youngest member, then shifts from 1 back to that level.
  int search(Key k) {
    const int j = level_of(k);
    if (j == 0) return 0;
    remove(k);
    push_youngest(1, k);
    shift(1, j);
    return j;
  }

  void insert(Key k) {
    if (where_.count(k)) throw KeyError("duplicate key " + std::to_string(k));
    if (levels_.empty()) {
      levels_.emplace_back();
      push_youngest(1, k);
      return;
    }
    int t = levels();
    if (level_size(t) == layer_capacity(t)) {
      if (t == kMaxLayers) throw CapacityError("structure is full");
      levels_.emplace_back();
      ++t;
    }
    push_youngest(1, k);
    shift(1, t);
  }

  void erase(Key k) {
    const int j = level_of(k);
    if (j == 0) throw KeyError("missing key " + std::to_string(k));
    remove(k);
    const int t = levels();
    shift(t, j);
    if (level_size(t) == 0) levels_.pop_back();
  }

  /// Moves one key per step between adjacent levels. Downward steps take
  /// the oldest key of the source; upward steps take the youngest. The
  /// moved key always becomes the youngest of its new level.
  void shift(int from, int to) {
    while (from < to) {
      LWS_CHECK(level_size(from) > 0, "shift from an empty level");
      Key k = level(from).queue.front();
      remove(k);
      push_youngest(from + 1, k);
      ++from;
    }
    while (from > to) {
      LWS_CHECK(level_size(from) > 0, "shift from an empty level");
      Key k = level(from).queue.back();
      remove(k);
      push_youngest(from - 1, k);
      --from;
    }
  }

  /// Per-level recency order, oldest first.
  [[nodiscard]] std::vector<std::vector<Key>> orders() const {
    std::vector<std::vector<Key>> out;
    for (const auto& lv : levels_) out.emplace_back(lv.queue.begin(), lv.queue.end());
    return out;
  }

  [[nodiscard]] const std::set<Key>& keys(int j) const { return level(j).keys; }

 private:
  struct Level {
    std::set<Key> keys;
    std::list<Key> queue;  // oldest at front
  };
  struct Slot {
    int level;
    std::list<Key>::iterator pos;
  };

  Level& level(int j) { return levels_.at(static_cast<std::size_t>(j - 1)); }
  const Level& level(int j) const { return levels_.at(static_cast<std::size_t>(j - 1)); }

  void remove(Key k) {
    auto it = where_.find(k);
    Level& lv = level(it->second.level);
    lv.queue.erase(it->second.pos);
    lv.keys.erase(k);
    where_.erase(it);
  }

  void push_youngest(int j, Key k) {
    Level& lv = level(j);
    lv.keys.insert(k);
    lv.queue.push_back(k);
    where_[k] = Slot{j, std::prev(lv.queue.end())};
  }

  std::vector<Level> levels_;
  std::unordered_map<Key, Slot> where_;
};

/// w(x): the number of distinct keys accessed (or inserted) after the most
/// recent access to x, or the number of present keys when x is not present.
/// Backed by a Fenwick tree over access timestamps; each present key holds
/// one mark at the time of its last access.
class WorkingSetTracker {
 public:
  [[nodiscard]] std::uint64_t working_set_number(Key k) const {
    auto it = last_.find(k);
    if (it == last_.end()) return last_.size();
    return static_cast<std::uint64_t>(marks_total_ - prefix(it->second));
  }

  void record_access(Key k) {
    auto it = last_.find(k);
    if (it != last_.end()) add(it->second, -1);
    std::uint64_t ts = next_++;
    grow_to(next_);
    add(ts, +1);
    last_[k] = ts;
  }

  void erase(Key k) {
    auto it = last_.find(k);
    if (it == last_.end()) return;
    add(it->second, -1);
    last_.erase(it);
  }

  [[nodiscard]] bool contains(Key k) const { return last_.count(k) != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return last_.size(); }

 private:
  // Sum of marks at timestamps <= ts.
  [[nodiscard]] std::int64_t prefix(std::uint64_t ts) const {
    std::int64_t s = 0;
    for (std::uint64_t i = ts + 1; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  void add(std::uint64_t ts, std::int64_t delta) {
    marks_total_ += delta;
    raw_[ts] += delta;
    for (std::uint64_t i = ts + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  void grow_to(std::uint64_t n) {
    if (n <= raw_.size()) return;
    std::size_t cap = std::max<std::size_t>(64, raw_.size() * 2);
    while (cap < n) cap *= 2;
    raw_.resize(cap, 0);
    tree_.assign(cap + 1, 0);
    for (std::size_t i = 0; i < cap; ++i) {
      if (raw_[i] == 0) continue;
      for (std::size_t j = i + 1; j <= cap; j += j & (~j + 1)) tree_[j] += raw_[i];
    }
  }

  std::unordered_map<Key, std::uint64_t> last_;
  std::vector<std::int64_t> raw_;
  std::vector<std::int64_t> tree_{0};
  std::int64_t marks_total_ = 0;
  std::uint64_t next_ = 0;
};

/// UB(x) = min over present y of lg(w(y) + d(x, y)), d being the rank
/// distance in the current key set.
class UnifiedBoundTracker {
 public:
  void record_access(Key k) {
    if (!ws_.contains(k)) sorted_.insert(std::lower_bound(sorted_.begin(), sorted_.end(), k), k);
    ws_.record_access(k);
  }

  void erase(Key k) {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), k);
    if (it == sorted_.end() || *it != k) return;
    sorted_.erase(it);
    ws_.erase(k);
  }

  [[nodiscard]] std::uint64_t working_set_number(Key k) const { return ws_.working_set_number(k); }
  [[nodiscard]] bool contains(Key k) const { return ws_.contains(k); }

  /// Scans outward by rank; stops once the rank distance alone exceeds the
  /// best argument seen. nullopt when k is not present.
  [[nodiscard]] std::optional<double> unified_bound(Key k) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), k);
    if (it == sorted_.end() || *it != k) return std::nullopt;
    const std::size_t r = static_cast<std::size_t>(it - sorted_.begin());
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t d = 0; d < sorted_.size() && d < best; ++d) {
      if (r >= d) best = std::min(best, ws_.working_set_number(sorted_[r - d]) + d);
      if (d > 0 && r + d < sorted_.size()) best = std::min(best, ws_.working_set_number(sorted_[r + d]) + d);
      if (r < d && r + d >= sorted_.size()) break;
    }
    return lg(static_cast<double>(best));
  }

  [[nodiscard]] std::size_t size() const noexcept { return sorted_.size(); }

 private:
  WorkingSetTracker ws_;
  std::vector<Key> sorted_;
};

}  // namespace lws
