#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace iclef {

/// Seeded random source whose draws are identical on every standard library.
/// std::mt19937_64's raw output is fixed by the standard, but the
/// distributions and std::shuffle are not, so index draws and shuffles are
/// done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Draws `k` of `n` indices without replacement, in draw order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(k);
  return idx;
}

/// Stratified draw of `k` indices. `strata` maps a stratum key to the indices
/// belonging to it; each stratum is shuffled and strata are visited
/// round-robin in key order, skipping exhausted strata, until k are drawn.
/// Equal-sized strata with k divisible by their count receive k/count each.
/// The result is shuffled so strata interleave.
template <typename Key>
std::vector<std::size_t> stratified_sample(std::map<Key, std::vector<std::size_t>> strata, std::size_t k,
                                           Rng& rng) {
  std::vector<std::vector<std::size_t>> pools;
  for (auto& [key, members] : strata) {
    rng.shuffle(members);
    pools.push_back(std::move(members));
  }
  std::vector<std::size_t> picked;
  std::vector<std::size_t> cursor(pools.size(), 0);
  bool progress = true;
  while (picked.size() < k && progress) {
    progress = false;
    for (std::size_t p = 0; p < pools.size() && picked.size() < k; ++p) {
      if (cursor[p] < pools[p].size()) {
        picked.push_back(pools[p][cursor[p]++]);
        progress = true;
      }
    }
  }
  rng.shuffle(picked);
  return picked;
}

}  // namespace iclef
