#include "odontoceti/block.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <limits>
#include <string>

namespace odon {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void bytes(std::span<const std::uint8_t> bytes) {
    u32(static_cast<std::uint32_t>(bytes.size()));
    raw(bytes);
  }
  void ref(const BlockRef& r) {
    u32(r.author.index);
    u64(r.round);
    raw(r.digest.bytes);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
  Digest digest() {
    need(kDigestSize);
    Digest d;
    std::copy_n(in_.begin() + pos_, kDigestSize, d.bytes.begin());
    pos_ += kDigestSize;
    return d;
  }
  std::vector<std::uint8_t> bytes() {
    auto len = u32();
    need(len);
    std::vector<std::uint8_t> out(in_.begin() + pos_, in_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }
  BlockRef ref() {
    BlockRef r;
    r.author = ValidatorId{u32()};
    r.round = u64();
    r.digest = digest();
    return r;
  }
  std::uint32_t count(std::size_t min_element_size) {
    auto n = u32();
    if (min_element_size > 0 && n > (in_.size() - pos_) / min_element_size) {
      throw DecodeError("list length exceeds remaining input");
    }
    return n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("truncated block encoding");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_content(Writer& w, ValidatorId author, Round round, const std::vector<BlockRef>& parents,
                   const std::vector<Transaction>& payload) {
  w.u32(author.index);
  w.u64(round);
  w.u32(static_cast<std::uint32_t>(parents.size()));
  for (const auto& p : parents) w.ref(p);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  for (const auto& tx : payload) {
    w.u64(tx.id);
    w.u32(tx.client);
    w.i64(tx.created);
    w.bytes(tx.bytes);
  }
}

Digest content_digest(ValidatorId author, Round round, const std::vector<BlockRef>& parents,
                      const std::vector<Transaction>& payload) {
  Writer w;
  write_content(w, author, round, parents, payload);
  auto bytes = w.take();
  return sha256(bytes);
}

std::array<std::uint8_t, 32> validator_key(ValidatorId id) {
  std::string seed = "odontoceti-test-key/" + std::to_string(id.index);
  auto d = sha256({reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()});
  return d.bytes;
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out;
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr);
  return out;
}

Signature MacAuthenticator::sign(ValidatorId author, const Digest& digest) const {
  auto key = validator_key(author);
  Signature sig;
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), digest.bytes.data(), digest.bytes.size(),
       sig.bytes.data(), &len);
  return sig;
}

bool MacAuthenticator::verify(ValidatorId author, const Digest& digest,
                              const Signature& signature) const {
  return sign(author, digest) == signature;
}

const Authenticator& default_authenticator() {
  static const MacAuthenticator auth;
  return auth;
}

Block::Block(ValidatorId author, Round round, std::vector<BlockRef> parents,
             std::vector<Transaction> payload, Signature signature)
    : author_(author),
      round_(round),
      parents_(std::move(parents)),
      payload_(std::move(payload)),
      signature_(signature),
      digest_(content_digest(author_, round_, parents_, payload_)) {}

Block Block::create(ValidatorId author, Round round, std::vector<BlockRef> parents,
                    std::vector<Transaction> payload, const Authenticator& auth) {
  Block block(author, round, std::move(parents), std::move(payload), Signature{});
  block.signature_ = auth.sign(author, block.digest_);
  return block;
}

Block Block::genesis(ValidatorId author, const Authenticator& auth) {
  return create(author, 0, {}, {}, auth);
}

std::size_t Block::payload_bytes() const {
  std::size_t total = 0;
  for (const auto& tx : payload_) total += tx.bytes.size();
  return total;
}

bool Block::operator==(const Block& other) const {
  return digest_ == other.digest_ && author_ == other.author_ && round_ == other.round_ &&
         signature_ == other.signature_ && parents_ == other.parents_ && payload_ == other.payload_;
}

bool is_support(const Block& candidate, const BlockRef& leader) {
  const auto& parents = candidate.parents();
  return std::find(parents.begin(), parents.end(), leader) != parents.end();
}

std::vector<std::uint8_t> encode_block_content(const Block& block) {
  Writer w;
  write_content(w, block.author(), block.round(), block.parents(), block.payload());
  return w.take();
}

std::vector<std::uint8_t> encode_block(const Block& block) {
  Writer w;
  write_content(w, block.author(), block.round(), block.parents(), block.payload());
  w.bytes(block.signature().bytes);
  return w.take();
}

Block decode_block(std::span<const std::uint8_t> wire) {
  Reader r(wire);
  ValidatorId author{r.u32()};
  Round round = r.u64();
  std::vector<BlockRef> parents(r.count(4 + 8 + kDigestSize));
  for (auto& p : parents) p = r.ref();
  std::vector<Transaction> payload(r.count(8 + 4 + 8 + 4));
  for (auto& tx : payload) {
    tx.id = r.u64();
    tx.client = r.u32();
    tx.created = r.i64();
    tx.bytes = r.bytes();
  }
  auto sig_bytes = r.bytes();
  if (sig_bytes.size() != kDigestSize) throw DecodeError("signature has wrong length");
  if (!r.done()) throw DecodeError("trailing bytes after block");
  Signature sig;
  std::copy(sig_bytes.begin(), sig_bytes.end(), sig.bytes.begin());
  return Block(author, round, std::move(parents), std::move(payload), sig);
}

}  // namespace odon
