#include "prf/bloom.hpp"

#include <cmath>
#include <stdexcept>

namespace prf {

BloomPlan bloom_plan(uint64_t m_bits, uint64_t n_elems) {
  if (n_elems == 0) throw std::invalid_argument("bloom_plan: n must be >= 1");
  BloomPlan p;
  if (m_bits == 0) {
    p.hashes = 0;
    p.fpr = 1.0;
    return p;
  }
  double ratio = static_cast<double>(m_bits) / static_cast<double>(n_elems);
  double h_raw = std::ceil(ratio * M_LN2);
  p.hashes = h_raw <= kMaxBloomHashes ? static_cast<unsigned>(h_raw)
                                      : kMaxBloomHashes;
  // (1 - e^{-hn/m})^h; at the memory-optimal h this is the familiar 0.5^h,
  // and it stays honest when the ceil rounding or the hash cap move h off
  // that optimum.
  double x = static_cast<double>(p.hashes) * n_elems / m_bits;
  p.fpr = std::pow(1.0 - std::exp(-x), static_cast<double>(p.hashes));
  return p;
}

static uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

Hash128 hash_prefix(KeyView key, unsigned l, uint64_t seed) {
  uint64_t h1 = seed ^ (uint64_t(l) * 0x9e3779b97f4a7c15ULL);
  uint64_t h2 = mix64(seed + 0x6a09e667f3bcc909ULL + l);
  unsigned full = l / kWordBits;
  for (unsigned i = 0; i < full; i++) {
    h1 = mix64(h1 ^ key.w[i]);
    h2 = mix64(h2 + (key.w[i] * 0x2545f4914f6cdd1dULL));
  }
  if (l % kWordBits != 0) {
    Word last = key.w[full] & (~Word(0) << (kWordBits - l % kWordBits));
    h1 = mix64(h1 ^ last);
    h2 = mix64(h2 + (last * 0x2545f4914f6cdd1dULL));
  }
  return {mix64(h1 ^ (h2 >> 32)), h2 | 1};
}

BloomFilter::BloomFilter(uint64_t m_bits, uint64_t n_elems, unsigned prefix_len,
                         uint64_t seed)
    : m_(m_bits),
      plan_(bloom_plan(m_bits, n_elems)),
      prefix_len_(prefix_len),
      seed_(seed),
      bits_((m_bits + 63) / 64, 0) {}

void BloomFilter::set_positions(uint64_t h1, uint64_t h2) {
  for (unsigned i = 0; i < plan_.hashes; i++) {
    uint64_t pos = (h1 + i * h2) % m_;
    bits_[pos / 64] |= uint64_t(1) << (pos % 64);
  }
}

bool BloomFilter::test_positions(uint64_t h1, uint64_t h2) const {
  for (unsigned i = 0; i < plan_.hashes; i++) {
    uint64_t pos = (h1 + i * h2) % m_;
    if ((bits_[pos / 64] & (uint64_t(1) << (pos % 64))) == 0) return false;
  }
  return true;
}

void BloomFilter::insert(KeyView prefix) {
  if (prefix.width != prefix_len_)
    throw std::invalid_argument("bloom insert: wrong prefix length");
  insert_prefix_of(prefix);
}

bool BloomFilter::query(KeyView prefix) const {
  if (prefix.width != prefix_len_)
    throw std::invalid_argument("bloom query: wrong prefix length");
  return query_prefix_of(prefix);
}

void BloomFilter::insert_prefix_of(KeyView key) {
  assert(!frozen_);
  if (m_ == 0) return;
  Hash128 h = hash_prefix(key, prefix_len_, seed_);
  set_positions(h.h1, h.h2);
}

bool BloomFilter::query_prefix_of(KeyView key) const {
  if (m_ == 0) return true;  // zero-memory filter can rule nothing out
  Hash128 h = hash_prefix(key, prefix_len_, seed_);
  return test_positions(h.h1, h.h2);
}

}  // namespace prf
