#pragma once

// Trace generators and the text trace format: one `<S|I|D> <key>` per line,
// `#` starts a comment line.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lws/types.hpp"

namespace lws {

enum class OpKind : std::uint8_t { search, insert, erase };

struct TraceOp {
  OpKind kind = OpKind::search;
  Key key = 0;

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

using Trace = std::vector<TraceOp>;

constexpr char op_letter(OpKind k) noexcept {
  switch (k) {
    case OpKind::insert: return 'I';
    case OpKind::erase: return 'D';
    default: return 'S';
  }
}

enum class Family : std::uint8_t { uniform, zipf_recency, sequential_scan, finger_walk, repeat_block, mixed };

inline const char* family_name(Family f) noexcept {
  switch (f) {
    case Family::uniform: return "uniform";
    case Family::zipf_recency: return "zipf_recency";
    case Family::sequential_scan: return "sequential_scan";
    case Family::finger_walk: return "finger_walk";
    case Family::repeat_block: return "repeat_block";
    case Family::mixed: return "mixed";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  for (Family f : {Family::uniform, Family::zipf_recency, Family::sequential_scan, Family::finger_walk,
                   Family::repeat_block, Family::mixed}) {
    if (s == family_name(f)) return f;
  }
  throw std::invalid_argument("unknown trace family '" + std::string(s) + "'");
}

struct GeneratorSpec {
  Family family = Family::uniform;
  std::uint64_t n = 100;    // universe {1..n}
  std::uint64_t ops = 1000;
  std::uint64_t seed = 1;
  double theta = 1.0;       // zipf_recency exponent
  std::uint64_t width = 8;  // repeat_block block size
};

/// Every family except `mixed` yields searches over {1..n}; `mixed` yields
/// valid interleaved inserts, deletes and searches starting from empty.
inline Trace generate(const GeneratorSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("universe size must be positive");
  if (spec.family == Family::zipf_recency && !(spec.theta > 0.0))
    throw std::invalid_argument("zipf exponent must be positive");
  if (spec.family == Family::repeat_block && (spec.width == 0 || spec.width > spec.n))
    throw std::invalid_argument("block width must be in 1..n");

  std::mt19937_64 rng(spec.seed);
  const Key n = static_cast<Key>(spec.n);
  auto uniform_key = [&] { return std::uniform_int_distribution<Key>(1, n)(rng); };
  Trace out;
  out.reserve(spec.ops);
  auto emit = [&](OpKind k, Key key) { out.push_back({k, key}); };

  switch (spec.family) {
    case Family::uniform:
      while (out.size() < spec.ops) emit(OpKind::search, uniform_key());
      break;

    case Family::sequential_scan:
      for (std::uint64_t i = 0; i < spec.ops; ++i) emit(OpKind::search, static_cast<Key>(i % spec.n) + 1);
      break;

    case Family::finger_walk: {
      Key cur = uniform_key();
      while (out.size() < spec.ops) {
        emit(OpKind::search, cur);
        if (n == 1) continue;
        Key step = rng() % 2 ? 1 : -1;
        if (cur + step < 1 || cur + step > n) step = -step;
        cur += step;
      }
      break;
    }

    case Family::zipf_recency: {
      // Move-to-front list; rank r (1-based) is drawn with weight r^-theta.
      std::vector<Key> mtf(spec.n);
      std::iota(mtf.begin(), mtf.end(), 1);
      std::shuffle(mtf.begin(), mtf.end(), rng);
      std::vector<double> cdf(spec.n);
      double acc = 0;
      for (std::uint64_t r = 0; r < spec.n; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -spec.theta);
        cdf[r] = acc;
      }
      std::uniform_real_distribution<double> u(0.0, acc);
      while (out.size() < spec.ops) {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
        auto r = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(spec.n) - 1));
        Key k = mtf[r];
        std::rotate(mtf.begin(), mtf.begin() + static_cast<std::ptrdiff_t>(r), mtf.begin() + static_cast<std::ptrdiff_t>(r) + 1);
        emit(OpKind::search, k);
      }
      break;
    }

    case Family::repeat_block: {
      // Rounds of `width` random keys, each round cycled four times.
      std::vector<Key> block;
      while (out.size() < spec.ops) {
        block.clear();
        while (block.size() < spec.width) {
          Key k = uniform_key();
          if (std::find(block.begin(), block.end(), k) == block.end()) block.push_back(k);
        }
        for (int rep = 0; rep < 4 && out.size() < spec.ops; ++rep)
          for (Key k : block)
            if (out.size() < spec.ops) emit(OpKind::search, k);
      }
      break;
    }

    case Family::mixed: {
      std::vector<Key> present;
      std::unordered_map<Key, std::size_t> slot;
      while (out.size() < spec.ops) {
        const auto roll = rng() % 3;
        if (present.empty() || (roll == 0 && present.size() < spec.n)) {
          Key k = uniform_key();
          while (slot.count(k)) k = uniform_key();
          slot[k] = present.size();
          present.push_back(k);
          emit(OpKind::insert, k);
        } else if (roll == 1) {
          std::size_t i = rng() % present.size();
          Key k = present[i];
          slot[present.back()] = i;
          present[i] = present.back();
          present.pop_back();
          slot.erase(k);
          emit(OpKind::erase, k);
        } else {
          emit(OpKind::search, uniform_key());
        }
      }
      break;
    }
  }
  return out;
}

/// Inserts of {1..n} in shuffled order, followed by `trace`.
inline Trace with_preload(const Trace& trace, std::uint64_t n, std::uint64_t seed) {
  Trace out;
  out.reserve(n + trace.size());
  for (std::uint64_t k = 1; k <= n; ++k) out.push_back({OpKind::insert, static_cast<Key>(k)});
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(out.begin(), out.end(), rng);
  out.insert(out.end(), trace.begin(), trace.end());
  return out;
}

inline std::string serialize(const Trace& trace) {
  std::string out;
  out.reserve(trace.size() * 8);
  for (const auto& op : trace) {
    out += op_letter(op.kind);
    out += ' ';
    out += std::to_string(op.key);
    out += '\n';
  }
  return out;
}

inline Trace parse(std::string_view text) {
  Trace out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;

    TraceOp op;
    switch (line.front()) {
      case 'S': op.kind = OpKind::search; break;
      case 'I': op.kind = OpKind::insert; break;
      case 'D': op.kind = OpKind::erase; break;
      default: throw ParseError(line_no, 1, "expected S, I or D");
    }
    if (line.size() < 2 || line[1] != ' ') throw ParseError(line_no, 2, "expected a single space");
    const char* first = line.data() + 2;
    const char* last = line.data() + line.size();
    if (first == last) throw ParseError(line_no, 3, "missing key");
    auto [ptr, ec] = std::from_chars(first, last, op.key);
    if (ec == std::errc::result_out_of_range) throw ParseError(line_no, 3, "key out of range");
    if (ec != std::errc{}) throw ParseError(line_no, 3, "expected a decimal key");
    if (ptr != last) throw ParseError(line_no, static_cast<std::size_t>(ptr - line.data()) + 1, "trailing characters");
    out.push_back(op);
  }
  return out;
}

}  // namespace lws
