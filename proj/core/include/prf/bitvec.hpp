#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace prf {

// Append-only bit vector with rank support. Rank is answered from a 32-bit
// cumulative counter per 256-bit block (12.5% overhead); select is answered
// by binary search over the same counters, so it costs no extra memory.
class BitVec {
 public:
  void push_back(bool bit) {
    if (nbits_ % 64 == 0) words_.push_back(0);
    if (bit) words_.back() |= uint64_t(1) << (63 - nbits_ % 64);
    nbits_++;
  }

  void freeze() {
    blocks_.clear();
    blocks_.reserve((nbits_ + kBlockBits - 1) / kBlockBits);
    uint32_t acc = 0;
    for (uint64_t b = 0; b * kBlockBits < nbits_; b++) {
      blocks_.push_back(acc);
      for (uint64_t w = b * kWordsPerBlock;
           w < (b + 1) * kWordsPerBlock && w < words_.size(); w++)
        acc += static_cast<uint32_t>(std::popcount(words_[w]));
    }
    ones_ = acc;
  }

  uint64_t size() const { return nbits_; }
  uint64_t ones() const { return ones_; }

  bool get(uint64_t i) const {
    assert(i < nbits_);
    return (words_[i / 64] >> (63 - i % 64)) & 1;
  }

  // Number of set bits in [0, i).
  uint64_t rank1(uint64_t i) const {
    assert(i <= nbits_);
    if (i == 0) return 0;
    if (i == nbits_) return ones_;
    uint64_t block = i / kBlockBits;
    uint64_t r = blocks_[block];
    uint64_t w = block * kWordsPerBlock;
    for (; (w + 1) * 64 <= i; w++) r += std::popcount(words_[w]);
    uint64_t rem = i - w * 64;
    if (rem > 0) r += std::popcount(words_[w] >> (64 - rem));
    return r;
  }

  uint64_t rank0(uint64_t i) const { return i - rank1(i); }

  // Position of the j-th set bit, 1-based. Requires 1 <= j <= ones().
  uint64_t select1(uint64_t j) const {
    assert(j >= 1 && j <= ones_);
    // last block whose cumulative count is < j
    uint64_t lo = 0, hi = blocks_.size();
    while (lo + 1 < hi) {
      uint64_t mid = (lo + hi) / 2;
      if (blocks_[mid] < j)
        lo = mid;
      else
        hi = mid;
    }
    uint64_t count = blocks_[lo];
    for (uint64_t w = lo * kWordsPerBlock; w < words_.size(); w++) {
      unsigned pc = static_cast<unsigned>(std::popcount(words_[w]));
      if (count + pc < j) {
        count += pc;
        continue;
      }
      uint64_t word = words_[w];
      for (unsigned b = 0; b < 64; b++) {
        if ((word >> (63 - b)) & 1) {
          if (++count == j) return w * 64 + b;
        }
      }
    }
    assert(false);
    return nbits_;
  }

  // Physical footprint: data words, rank counters, and the length register.
  uint64_t size_bits() const {
    return words_.size() * 64 + blocks_.size() * 32 + 64;
  }

 private:
  static constexpr uint64_t kBlockBits = 256;
  static constexpr uint64_t kWordsPerBlock = kBlockBits / 64;
  std::vector<uint64_t> words_;
  std::vector<uint32_t> blocks_;
  uint64_t nbits_ = 0;
  uint64_t ones_ = 0;
};

// Raw bit store without rank support, for suffix bits addressed by computed
// offsets.
class RawBits {
 public:
  void append_bit(bool bit) {
    if (nbits_ % 64 == 0) words_.push_back(0);
    if (bit) words_.back() |= uint64_t(1) << (63 - nbits_ % 64);
    nbits_++;
  }

  // Appends bits [from, from+len) of a bit string stored in big-endian words.
  void append_range(const uint64_t* w, unsigned from, unsigned len) {
    for (unsigned i = 0; i < len; i++) {
      unsigned p = from + i;
      append_bit((w[p / 64] >> (63 - p % 64)) & 1);
    }
  }

  uint64_t size() const { return nbits_; }

  bool get(uint64_t i) const {
    assert(i < nbits_);
    return (words_[i / 64] >> (63 - i % 64)) & 1;
  }

  // Reads n <= 64 bits starting at pos, right-aligned in the result.
  uint64_t read(uint64_t pos, unsigned n) const {
    assert(pos + n <= nbits_ && n <= 64);
    uint64_t v = 0;
    uint64_t i = pos;
    unsigned left = n;
    while (left > 0) {
      uint64_t wi = i / 64;
      unsigned off = i % 64;
      unsigned take = std::min<unsigned>(64 - off, left);
      uint64_t chunk = (words_[wi] << off) >> (64 - take);
      v = (v << take) | chunk;
      i += take;
      left -= take;
    }
    return v;
  }

  uint64_t size_bits() const { return words_.size() * 64 + 64; }

 private:
  std::vector<uint64_t> words_;
  uint64_t nbits_ = 0;
};

}  // namespace prf
