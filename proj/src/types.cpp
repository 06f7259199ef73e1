#include "odontoceti/types.hpp"

#include <ostream>
#include <stdexcept>

namespace odon {

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Digest::hex() const {
  std::string out;
  out.reserve(2 * bytes.size());
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::string Digest::short_hex() const { return hex().substr(0, 8); }

Digest Digest::from_hex(const std::string& text) {
  if (text.size() != 2 * kDigestSize) throw std::invalid_argument("digest: wrong hex length");
  Digest d;
  for (std::size_t i = 0; i < kDigestSize; ++i) {
    int hi = hex_value(text[2 * i]);
    int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("digest: invalid hex character");
    d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

std::string BlockRef::to_string() const {
  return "B(v" + std::to_string(author.index) + ",r" + std::to_string(round) + "," +
         digest.short_hex() + ")";
}

std::ostream& operator<<(std::ostream& os, const ValidatorId& id) { return os << 'v' << id.index; }

std::ostream& operator<<(std::ostream& os, const BlockRef& ref) { return os << ref.to_string(); }

}  // namespace odon
