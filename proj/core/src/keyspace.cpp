#include "prf/keyspace.hpp"

namespace prf {

Key prefix(KeyView key, unsigned l) {
  if (l > key.width) throw std::invalid_argument("prefix length exceeds key width");
  Key out(l);
  if (l > 0) kv_copy_prefix(key, l, out.words());
  return out;
}

uint64_t sat_cover_count(KeyView left, KeyView right, unsigned l) {
  assert(l >= 1 && l <= left.width && left.width == right.width);
  assert(!kv_less(right, left));
  // count = value(prefix(right, l)) - value(prefix(left, l)) + 1. Right-align
  // the top l bits of both bounds and subtract word-wise.
  unsigned n = words_for_bits(l);
  unsigned shift = n * kWordBits - l;
  Word mask = last_word_mask(l);
  KeyScratch d;
  unsigned borrow = 0;
  for (unsigned i = n; i-- > 0;) {
    Word ai = left.w[i], bi = right.w[i];
    if (i == n - 1) {
      ai &= mask;
      bi &= mask;
    }
    Word ra = ai >> shift, rb = bi >> shift;
    if (shift > 0 && i > 0) {
      ra |= left.w[i - 1] << (kWordBits - shift);
      rb |= right.w[i - 1] << (kWordBits - shift);
    }
    d.w[i] = rb - ra - borrow;
    borrow = (rb < ra || (rb == ra && borrow)) ? 1 : 0;
  }
  bool sat = false;
  for (unsigned i = 0; i + 1 < n; i++)
    if (d.w[i] != 0) sat = true;
  return (sat || d.w[n - 1] >= kSatCount - 1) ? kSatCount : d.w[n - 1] + 1;
}

PrefixCover prefix_count(QueryView q, unsigned l) {
  if (l < 1 || l > q.left.width)
    throw std::invalid_argument("prefix length out of range");
  PrefixCover c;
  c.length = l;
  c.first = prefix(q.left, l);
  c.last = prefix(q.right, l);
  c.count = sat_cover_count(q.left, q.right, l);
  return c;
}

Key pad(std::span<const uint8_t> raw, size_t target) {
  if (raw.size() > target)
    throw std::invalid_argument("pad: input longer than target length");
  Key k(static_cast<unsigned>(target * 8));
  for (size_t i = 0; i < raw.size(); i++)
    k.words()[i / 8] |= Word(raw[i]) << (56 - 8 * (i % 8));
  return k;
}

Key pad(const std::string& raw, size_t target) {
  return pad(std::span<const uint8_t>(
                 reinterpret_cast<const uint8_t*>(raw.data()), raw.size()),
             target);
}

NeighborLcps neighbor_lcps(QueryView q, const KeySet& keys, size_t* hint) {
  NeighborLcps nb;
  nb.qlcp = kv_lcp(q.left, q.right);

  size_t start = 0;
  if (hint != nullptr) {
    start = *hint;
    // The hint is a lower bound position from an earlier query with a
    // smaller left bound; advance it linearly.
    while (start < keys.size() && kv_less(keys[start], q.left)) start++;
    // Guard against a stale hint past the true position.
    while (start > 0 && !kv_less(keys[start - 1], q.left)) start--;
    *hint = start;
  } else {
    start = keys.lower_bound(q.left);
  }

  // start = index of first key >= left
  if (start < keys.size() && kv_leq(keys[start], q.right))
    throw NotEmptyError("query interval intersects the key set");

  if (start > 0) nb.lcp_left = kv_lcp(keys[start - 1], q.left);
  if (start < keys.size()) nb.lcp_right = kv_lcp(keys[start], q.right);
  nb.min_len = std::max(nb.lcp_left, nb.lcp_right);
  return nb;
}

unsigned interval_lcp(QueryView q, const KeySet& keys) {
  return neighbor_lcps(q, keys).min_len;
}

EndpointAnalysis endpoint_analysis(QueryView q, const NeighborLcps& nb,
                                   unsigned l1, unsigned l2) {
  unsigned k = q.left.width;
  if (!(1 <= l1 && l1 < l2 && l2 <= k))
    throw std::invalid_argument("endpoint_analysis: need 1 <= l1 < l2 <= width");

  EndpointAnalysis ea;
  bool single = l1 <= nb.qlcp;  // one l1-region covers the whole query
  if (single) {
    ea.i2 = nb.min_len >= l1;
    ea.i3 = false;
    ea.l_size = sat_cover_count(q.left, q.right, l2);
    ea.r_size = 0;
    ea.i0 = !(kv_low_zero(q.left, l1) && kv_low_ones(q.right, l1));
    ea.i1 = false;
  } else {
    ea.i2 = nb.lcp_left >= l1;
    ea.i3 = nb.lcp_right >= l1;
    // l2-prefixes of Q under the first region: from prefix(left, l2) to the
    // region's top. Width l2-l1 determines the region's l2 capacity.
    uint64_t cap = (l2 - l1 >= 62) ? kSatCount : (uint64_t(1) << (l2 - l1));
    uint64_t lo = kv_bits_range_sat(q.left, l1, l2);
    uint64_t hi = kv_bits_range_sat(q.right, l1, l2);
    ea.l_size = cap > lo ? cap - lo : kSatCount;
    ea.r_size = std::min(hi + 1, kSatCount);
    ea.i0 = !kv_low_zero(q.left, l1);
    ea.i1 = !kv_low_ones(q.right, l1);
  }
  return ea;
}

EndpointAnalysis endpoint_analysis(QueryView q, const KeySet& keys, unsigned l1,
                                   unsigned l2) {
  return endpoint_analysis(q, neighbor_lcps(q, keys), l1, l2);
}

uint64_t count_unique_prefixes(const KeySet& keys, unsigned l) {
  if (keys.empty()) throw std::invalid_argument("empty key set");
  if (l == 0) return 1;
  if (l > keys.width()) throw std::invalid_argument("prefix length exceeds width");
  uint64_t n = 1;
  for (size_t i = 1; i < keys.size(); i++)
    if (kv_lcp(keys[i - 1], keys[i]) < l) n++;
  return n;
}

std::vector<uint64_t> prefix_count_table(const KeySet& keys) {
  if (keys.empty()) throw std::invalid_argument("empty key set");
  unsigned k = keys.width();
  // hist[l] = adjacent pairs whose LCP is exactly l; duplicates (lcp == k)
  // never start a new prefix at any length <= k.
  std::vector<uint64_t> hist(k + 1, 0);
  for (size_t i = 1; i < keys.size(); i++) {
    unsigned l = kv_lcp(keys[i - 1], keys[i]);
    if (l < k) hist[l]++;
  }
  std::vector<uint64_t> counts(k + 1);
  counts[0] = 1;
  uint64_t acc = 1;
  for (unsigned l = 1; l <= k; l++) {
    acc += hist[l - 1];
    counts[l] = acc;
  }
  return counts;
}

}  // namespace prf
