#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

namespace odon {

using Round = std::uint64_t;

/// Simulated time in integer microseconds.
using Micros = std::int64_t;

constexpr Micros millis(std::int64_t ms) { return ms * 1000; }
constexpr double to_millis(Micros us) { return static_cast<double>(us) / 1000.0; }

struct ValidatorId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const ValidatorId&) const = default;
};

constexpr std::size_t kDigestSize = 32;

struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  auto operator<=>(const Digest&) const = default;

  std::string hex() const;
  std::string short_hex() const;  // first 8 hex chars, for logs
  static Digest from_hex(const std::string& text);
};

using Signature = Digest;

/// Block identity: (author, round, digest).
struct BlockRef {
  ValidatorId author;
  Round round = 0;
  Digest digest;

  auto operator<=>(const BlockRef&) const = default;

  std::string to_string() const;
};

/// Linearization order inside a sub-DAG: round, then author, then digest.
struct RoundAuthorDigestLess {
  bool operator()(const BlockRef& a, const BlockRef& b) const {
    if (a.round != b.round) return a.round < b.round;
    if (a.author != b.author) return a.author < b.author;
    return a.digest < b.digest;
  }
};

std::ostream& operator<<(std::ostream& os, const ValidatorId& id);
std::ostream& operator<<(std::ostream& os, const BlockRef& ref);

}  // namespace odon

template <>
struct std::hash<odon::Digest> {
  std::size_t operator()(const odon::Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

template <>
struct std::hash<odon::BlockRef> {
  std::size_t operator()(const odon::BlockRef& r) const noexcept {
    std::size_t h = std::hash<odon::Digest>{}(r.digest);
    h ^= (static_cast<std::size_t>(r.round) << 20) ^ r.author.index;
    return h;
  }
};
