#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace lws {

using Key = std::int64_t;
using NodeId = std::uint32_t;
inline constexpr NodeId kNil = std::numeric_limits<NodeId>::max();

/// Deepest real layer index; 2^(2^5) = 2^32 elements.
inline constexpr int kMaxLayers = 5;

enum class Color : std::uint8_t { red, black };
enum class Dir : std::uint8_t { left, right };

constexpr Dir opposite(Dir d) noexcept { return d == Dir::left ? Dir::right : Dir::left; }

// Errors a caller can provoke with bad input.
struct KeyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};
struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

// A broken internal invariant. Raised instead of assert() so release builds
// still fail loudly.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace lws

#define LWS_CHECK(cond, msg)                                                        \
  do {                                                                              \
    if (!(cond)) throw ::lws::InvariantError(std::string(__FILE__ ":") +           \
                                             std::to_string(__LINE__) + ": " + (msg)); \
  } while (0)
