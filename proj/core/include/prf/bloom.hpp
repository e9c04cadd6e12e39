#pragma once

#include <cstdint>
#include <vector>

#include "prf/key.hpp"

namespace prf {

inline constexpr unsigned kMaxBloomHashes = 32;

struct BloomPlan {
  unsigned hashes = 0;
  double fpr = 1.0;
};

// Hash count and per-probe false positive probability for an m-bit filter
// holding n elements. h = min(32, ceil(m/n * ln 2)). While h is uncapped the
// probability is 0.5^h; once the cap binds that closed form no longer holds
// and the general (1 - e^{-hn/m})^h is used instead.
BloomPlan bloom_plan(uint64_t m_bits, uint64_t n_elems);

// Standard Bloom filter over fixed-length key prefixes. Bit positions come
// from two seeded 64-bit hashes combined as h1 + i*h2 mod m. The modulus is
// the exact bit budget, no power-of-two rounding.
class BloomFilter {
 public:
  // n is the number of elements that will be inserted (fixes the hash count).
  BloomFilter(uint64_t m_bits, uint64_t n_elems, unsigned prefix_len,
              uint64_t seed);

  unsigned prefix_len() const { return prefix_len_; }
  unsigned hashes() const { return plan_.hashes; }
  double planned_fpr() const { return plan_.fpr; }
  uint64_t size_bits() const { return m_; }
  uint64_t seed() const { return seed_; }

  // Insert/query a whole prefix (view width must equal prefix_len).
  void insert(KeyView prefix);
  bool query(KeyView prefix) const;

  // Insert/query the top prefix_len bits of a full-width key.
  void insert_prefix_of(KeyView key);
  bool query_prefix_of(KeyView key) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const std::vector<uint64_t>& bits() const { return bits_; }

 private:
  void set_positions(uint64_t h1, uint64_t h2);
  bool test_positions(uint64_t h1, uint64_t h2) const;

  uint64_t m_;
  BloomPlan plan_;
  unsigned prefix_len_;
  uint64_t seed_;
  bool frozen_ = false;
  std::vector<uint64_t> bits_;
};

// Two seeded 64-bit hashes over the top l bits of a key.
struct Hash128 {
  uint64_t h1, h2;
};
Hash128 hash_prefix(KeyView key, unsigned l, uint64_t seed);

}  // namespace prf
