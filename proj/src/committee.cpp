#include "odontoceti/committee.hpp"

#include <stdexcept>
#include <string>

namespace odon {

Committee::Committee(std::uint32_t n, std::uint32_t leaders_per_round, bool unsafe_parent_threshold)
    : n_(n), f_(0), leaders_per_round_(leaders_per_round), unsafe_(unsafe_parent_threshold) {
  if (n < 6 || (n - 1) % 5 != 0) {
    throw std::invalid_argument("committee size " + std::to_string(n) +
                                " is not of the form 5f+1 with f >= 1");
  }
  f_ = (n - 1) / 5;
  if (leaders_per_round < 1 || leaders_per_round > quorum_threshold()) {
    throw std::invalid_argument("leaders per round must be in [1, 4f+1], got " +
                                std::to_string(leaders_per_round));
  }
}

std::uint32_t Committee::parent_threshold() const {
  if (!unsafe_) return quorum_threshold();
  return (2 * n_ + 2) / 3;
}

std::vector<ValidatorId> Committee::validators() const {
  std::vector<ValidatorId> out;
  out.reserve(n_);
  for (std::uint32_t i = 0; i < n_; ++i) out.push_back(ValidatorId{i});
  return out;
}

ValidatorId Committee::elect_leader(Round round, std::uint32_t rank) const {
  if (rank >= leaders_per_round_) {
    throw std::out_of_range("leader rank " + std::to_string(rank) + " out of range");
  }
  return ValidatorId{static_cast<std::uint32_t>((round + rank) % n_)};
}

}  // namespace odon
