#pragma once

#include <cstdint>
#include <vector>

#include "odontoceti/types.hpp"

namespace odon {

/// Equal-stake validator set of size n = 5f + 1.
///
/// Quorum arithmetic:
///   direct quorum   4f + 1   (block parents, direct commit/skip)
///   indirect quorum 2f + 1   (thick link, early block production)
///
/// The parent threshold normally equals the direct quorum. The unsafe variant
/// lowers it to ceil(2n/3) and leaves every decision threshold alone.
class Committee {
 public:
  /// Throws std::invalid_argument unless n = 5f + 1 with f >= 1 and
  /// 1 <= leaders_per_round <= 4f + 1.
  explicit Committee(std::uint32_t n, std::uint32_t leaders_per_round = 1,
                     bool unsafe_parent_threshold = false);

  std::uint32_t size() const { return n_; }
  std::uint32_t max_faulty() const { return f_; }
  std::uint32_t quorum_threshold() const { return 4 * f_ + 1; }
  std::uint32_t indirect_quorum_threshold() const { return 2 * f_ + 1; }
  std::uint32_t parent_threshold() const;
  std::uint32_t leaders_per_round() const { return leaders_per_round_; }
  bool unsafe_parent_threshold() const { return unsafe_; }

  bool contains(ValidatorId id) const { return id.index < n_; }
  std::vector<ValidatorId> validators() const;

  /// Round-robin schedule, rank 0 highest: V[(round + rank) mod n].
  /// Throws std::out_of_range if rank >= leaders_per_round().
  ValidatorId elect_leader(Round round, std::uint32_t rank) const;

 private:
  std::uint32_t n_;
  std::uint32_t f_;
  std::uint32_t leaders_per_round_;
  bool unsafe_;
};

/// Counts distinct validators (one unit of stake each) until a threshold is hit.
class QuorumCounter {
 public:
  QuorumCounter(const Committee& committee, std::uint32_t threshold)
      : seen_(committee.size(), false), threshold_(threshold) {}

  /// Returns true once the threshold has been reached (including by this call).
  bool add(ValidatorId id) {
    if (id.index < seen_.size() && !seen_[id.index]) {
      seen_[id.index] = true;
      ++count_;
    }
    return reached();
  }

  bool reached() const { return count_ >= threshold_; }
  std::uint32_t count() const { return count_; }

 private:
  std::vector<bool> seen_;
  std::uint32_t count_ = 0;
  std::uint32_t threshold_;
};

}  // namespace odon
