#pragma once

#include <cstdint>
#include <span>

namespace prf {

// Cost model shared by the trie encoder and the design-selection model. The
// model-side memory estimate and the built structure's accounting must agree
// on these constants, otherwise budget math drifts between planning and
// construction.
//
// The trie is binary at bit granularity. A dense level stores two bitmaps
// (child labels, has-child) of 2 bits per node; a sparse level stores three
// per-edge bit vectors (label, has-child, louds). Rank directories cost
// 32 bits per 256-bit block. The estimate prices every level at its full
// prefix count, ignoring the bits saved by diverting single-key branches to
// the suffix store, so it upper-bounds the built size.
namespace trie_cost {

inline constexpr uint64_t kRankBlockBits = 256;
inline constexpr uint64_t kRankEntryBits = 32;
// Per bit vector: 64-bit length register plus word-rounding allowance.
inline constexpr uint64_t kBitvecFixedBits = 128;
// Per level: suffix cursor and edge/terminal registers.
inline constexpr uint64_t kPerLevelBits = 192;
// Structure header allowance (depth, cutoff, suffix store fixed costs).
inline constexpr uint64_t kHeaderBits = 256;

inline uint64_t bitvec_estimate(uint64_t nbits) {
  return nbits + (nbits + kRankBlockBits - 1) / kRankBlockBits * kRankEntryBits +
         kBitvecFixedBits;
}

// Estimated size of edge-level d (1-based) given per-length unique prefix
// counts of the key set.
inline uint64_t level_estimate(unsigned d, bool dense,
                               std::span<const uint64_t> counts) {
  if (dense) return 2 * bitvec_estimate(2 * counts[d - 1]);
  return 3 * bitvec_estimate(counts[d]);
}

}  // namespace trie_cost

struct TriePlan {
  uint64_t bits = 0;
  unsigned dense_cutoff = 0;  // levels 1..cutoff dense, rest sparse
};

// Upper-bound size estimate for a depth-l1 trie over the key set described
// by `counts` (counts[l] = unique l-bit prefixes), minimized over the
// dense/sparse cutoff. Ties prefer the more-sparse (smaller) cutoff.
inline TriePlan plan_trie(unsigned l1, std::span<const uint64_t> counts) {
  TriePlan best;
  if (l1 == 0) return best;
  uint64_t fixed =
      trie_cost::kHeaderBits + uint64_t(l1) * trie_cost::kPerLevelBits;
  // sparse_tail[c] = cost of levels c+1..l1 sparse; walk cutoffs upward.
  uint64_t sparse_all = 0;
  for (unsigned d = 1; d <= l1; d++)
    sparse_all += trie_cost::level_estimate(d, false, counts);
  uint64_t dense_head = 0, sparse_tail = sparse_all;
  best.bits = fixed + sparse_tail;
  best.dense_cutoff = 0;
  for (unsigned c = 1; c <= l1; c++) {
    dense_head += trie_cost::level_estimate(c, true, counts);
    sparse_tail -= trie_cost::level_estimate(c, false, counts);
    uint64_t total = fixed + dense_head + sparse_tail;
    if (total < best.bits) {
      best.bits = total;
      best.dense_cutoff = c;
    }
  }
  return best;
}

inline uint64_t trie_mem(unsigned l1, std::span<const uint64_t> counts) {
  return plan_trie(l1, counts).bits;
}

}  // namespace prf
