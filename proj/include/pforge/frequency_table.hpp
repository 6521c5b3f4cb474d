#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pforge/rng.hpp"

namespace pforge {

// Exact empirical counts over an ordered key set. Sampling is proportional
// to count and uses integer arithmetic only.
template <typename Key>
class FrequencyTable {
 public:
  using map_type = std::map<Key, std::uint64_t>;

  void add(const Key& key, std::uint64_t count = 1) {
    if (count == 0) return;
    counts_[key] += count;
    total_ += count;
  }

  void merge(const FrequencyTable& other) {
    for (const auto& [key, count] : other.counts_) add(key, count);
  }

  std::uint64_t count(const Key& key) const {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(const Key& key) const { return counts_.count(key) != 0; }

  std::uint64_t total() const { return total_; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const map_type& counts() const { return counts_; }

  double probability(const Key& key) const {
    return total_ == 0 ? 0.0 : static_cast<double>(count(key)) / static_cast<double>(total_);
  }

  std::vector<Key> keys() const {
    std::vector<Key> out;
    out.reserve(counts_.size());
    for (const auto& kv : counts_) out.push_back(kv.first);
    return out;
  }

  // Most frequent key; ties go to the smallest key.
  std::optional<Key> argmax() const {
    std::optional<Key> best;
    std::uint64_t best_count = 0;
    for (const auto& [key, count] : counts_) {
      if (count > best_count) {
        best = key;
        best_count = count;
      }
    }
    return best;
  }

  // Precondition: !empty().
  const Key& sample(Rng& rng) const { return sample_excluding(rng, nullptr); }

  // Draws proportionally to count, skipping `excluded` when it is present and
  // at least one other key exists.
  const Key& sample_excluding(Rng& rng, const Key* excluded) const {
    std::uint64_t total = total_;
    const Key* skip = nullptr;
    if (excluded != nullptr && counts_.size() > 1) {
      const auto it = counts_.find(*excluded);
      if (it != counts_.end()) {
        skip = &it->first;
        total -= it->second;
      }
    }
    std::uint64_t target = rng.below(total);
    for (const auto& kv : counts_) {
      if (skip == &kv.first) continue;
      if (target < kv.second) return kv.first;
      target -= kv.second;
    }
    return counts_.rbegin()->first;  // unreachable when counts are consistent
  }

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  map_type counts_;
  std::uint64_t total_ = 0;
};

}  // namespace pforge
