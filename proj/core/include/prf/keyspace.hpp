#pragma once

#include <optional>

#include "prf/errors.hpp"
#include "prf/key.hpp"

namespace prf {

// Set of unique l-bit prefixes covering a query interval. `count` saturates
// at kSatCount for astronomically wide covers.
struct PrefixCover {
  unsigned length = 0;
  uint64_t count = 0;
  Key first, last;
};

// Per-query geometry relative to a key set and a (l1, l2) design.
//
// i0/i1: the first/last l1-region of the query extends beyond the query
// bounds. i2/i3: the first/last l1-prefix of the query is present in the
// key set at l1 granularity (a trie hit). l_size/r_size: number of
// l2-prefixes of the query under the first/last l1-prefix. When the query
// spans a single l1-region everything is attributed to the left side
// (i1 = i3 = 0, r_size = 0).
struct EndpointAnalysis {
  bool i0 = false, i1 = false, i2 = false, i3 = false;
  uint64_t l_size = 0, r_size = 0;
};

// LCPs of a query against its nearest neighbors in a sorted key set.
// A missing neighbor contributes 0.
struct NeighborLcps {
  unsigned lcp_left = 0;   // lcp(pred(q.left), q.left)
  unsigned lcp_right = 0;  // lcp(succ(q.right), q.right)
  unsigned qlcp = 0;       // lcp(q.left, q.right)
  unsigned min_len = 0;    // lcp(Q, K) = max(lcp_left, lcp_right)
};

// Top l bits of key as a width-l key. l may be 0 (empty prefix).
Key prefix(KeyView key, unsigned l);

// Number of unique l-bit prefixes intersecting [left, right], saturating at
// kSatCount. Allocation-free core of prefix_count.
uint64_t sat_cover_count(KeyView left, KeyView right, unsigned l);

// Number of unique l-bit prefixes intersecting [q.left, q.right], along
// with the first and last ones. Requires 1 <= l <= width.
PrefixCover prefix_count(QueryView q, unsigned l);
inline PrefixCover prefix_count(const RangeQuery& q, unsigned l) {
  return prefix_count(QueryView{q.left, q.right}, l);
}

// Extends raw with trailing null bytes to `target` bytes and returns the
// fixed-width key. Throws std::invalid_argument if raw is longer.
Key pad(std::span<const uint8_t> raw, size_t target);
Key pad(const std::string& raw, size_t target);

// Longest common prefix between any value in the (empty) query interval and
// any key. Throws NotEmptyError if the interval intersects the key set.
unsigned interval_lcp(QueryView q, const KeySet& keys);
inline unsigned interval_lcp(const RangeQuery& q, const KeySet& keys) {
  return interval_lcp(QueryView{q.left, q.right}, keys);
}

// Neighbor LCPs via binary search; `hint` (index of the first key >= left
// from a previous nearby query) accelerates sorted scans.
NeighborLcps neighbor_lcps(QueryView q, const KeySet& keys, size_t* hint = nullptr);

// Endpoint geometry for an empty query under a (l1, l2) design.
// Requires 1 <= l1 < l2 <= width.
EndpointAnalysis endpoint_analysis(QueryView q, const KeySet& keys, unsigned l1,
                                   unsigned l2);
EndpointAnalysis endpoint_analysis(QueryView q, const NeighborLcps& nb,
                                   unsigned l1, unsigned l2);

// I2|L| + I3|R|: the number of Bloom probes a trie+Bloom hybrid performs for
// an empty query that survives the trie, saturating.
inline uint64_t probe_regions(const EndpointAnalysis& ea) {
  uint64_t n = (ea.i2 ? ea.l_size : 0) + (ea.i3 ? ea.r_size : 0);
  return std::min(n, kSatCount);
}

// Number of distinct l-bit prefixes in a sorted key set (duplicates allowed).
uint64_t count_unique_prefixes(const KeySet& keys, unsigned l);

// counts[l] = number of distinct l-bit prefixes, for l = 0..width. One pass
// over the successive LCPs of the sorted key set.
std::vector<uint64_t> prefix_count_table(const KeySet& keys);

}  // namespace prf
