#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "odontoceti/types.hpp"

namespace odon {

struct Transaction {
  std::uint64_t id = 0;
  std::uint32_t client = 0;
  Micros created = 0;
  std::vector<std::uint8_t> bytes;

  bool operator==(const Transaction&) const = default;
};

/// Signs and verifies block digests. Implementations must be deterministic.
class Authenticator {
 public:
  virtual ~Authenticator() = default;
  virtual Signature sign(ValidatorId author, const Digest& digest) const = 0;
  virtual bool verify(ValidatorId author, const Digest& digest,
                      const Signature& signature) const = 0;
};

/// Test-grade keyed MAC: HMAC-SHA256 under a key derived from the validator index.
class MacAuthenticator final : public Authenticator {
 public:
  Signature sign(ValidatorId author, const Digest& digest) const override;
  bool verify(ValidatorId author, const Digest& digest,
              const Signature& signature) const override;
};

const Authenticator& default_authenticator();

Digest sha256(std::span<const std::uint8_t> data);

/// Immutable DAG vertex. The digest is computed from the content at construction.
class Block {
 public:
  Block(ValidatorId author, Round round, std::vector<BlockRef> parents,
        std::vector<Transaction> payload, Signature signature);

  /// Builds and signs a block.
  static Block create(ValidatorId author, Round round, std::vector<BlockRef> parents,
                      std::vector<Transaction> payload, const Authenticator& auth);

  /// Canonical genesis block of `author` (round 0, no parents, empty payload).
  static Block genesis(ValidatorId author, const Authenticator& auth);

  ValidatorId author() const { return author_; }
  Round round() const { return round_; }
  const std::vector<BlockRef>& parents() const { return parents_; }
  const std::vector<Transaction>& payload() const { return payload_; }
  const Signature& signature() const { return signature_; }
  const Digest& digest() const { return digest_; }
  BlockRef reference() const { return {author_, round_, digest_}; }
  std::size_t payload_bytes() const;

  bool operator==(const Block& other) const;

 private:
  ValidatorId author_;
  Round round_;
  std::vector<BlockRef> parents_;
  std::vector<Transaction> payload_;
  Signature signature_;
  Digest digest_;
};

using BlockPtr = std::shared_ptr<const Block>;

/// True iff `leader` (full triplet) is one of `candidate`'s parents.
bool is_support(const Block& candidate, const BlockRef& leader);

// Canonical serialization: fields in declaration order, fixed-width little-endian
// integers, u32 length prefixes on every list and byte string.
//
//   block   := author:u32 round:u64 parents:list<ref> payload:list<tx> [signature:bytes]
//   ref     := author:u32 round:u64 digest:32 bytes
//   tx      := id:u64 client:u32 created_us:i64 bytes:bytes
//
// The digest covers everything except the signature; the wire form appends it.

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_block_content(const Block& block);
std::vector<std::uint8_t> encode_block(const Block& block);
Block decode_block(std::span<const std::uint8_t> wire);

}  // namespace odon
