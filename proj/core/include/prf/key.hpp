#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prf {

using Word = uint64_t;
inline constexpr unsigned kWordBits = 64;

// Largest key width the fixed scratch buffers support (bits).
inline constexpr unsigned kMaxKeyBits = 2048;
inline constexpr unsigned kMaxKeyWords = kMaxKeyBits / kWordBits;

// Prefix-interval counts saturate here; any probe count this large is
// numerically indistinguishable from "guaranteed positive" at double
// precision.
inline constexpr uint64_t kSatCount = uint64_t(1) << 62;

inline constexpr unsigned words_for_bits(unsigned bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

// Mask keeping the top `bits % 64` bits of the last word (all ones when the
// width is word aligned).
inline constexpr Word last_word_mask(unsigned bits) {
  unsigned rem = bits % kWordBits;
  return rem == 0 ? ~Word(0) : ~Word(0) << (kWordBits - rem);
}

// Non-owning view of a fixed-width big-endian bit string. Word 0 holds the
// most significant bits; bit 0 of the key is the MSB of word 0. Bits past
// `width` in the last word are zero.
struct KeyView {
  const Word* w = nullptr;
  uint32_t width = 0;

  unsigned nwords() const { return words_for_bits(width); }
};

inline unsigned kv_bit(KeyView k, unsigned i) {
  assert(i < k.width);
  return (k.w[i / kWordBits] >> (kWordBits - 1 - (i % kWordBits))) & 1u;
}

inline bool kv_eq(KeyView a, KeyView b) {
  assert(a.width == b.width);
  unsigned n = a.nwords();
  for (unsigned i = 0; i < n; i++)
    if (a.w[i] != b.w[i]) return false;
  return true;
}

inline bool kv_less(KeyView a, KeyView b) {
  assert(a.width == b.width);
  unsigned n = a.nwords();
  for (unsigned i = 0; i < n; i++) {
    if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
  }
  return false;
}

inline bool kv_leq(KeyView a, KeyView b) { return !kv_less(b, a); }

inline int kv_compare(KeyView a, KeyView b) {
  if (kv_less(a, b)) return -1;
  return kv_eq(a, b) ? 0 : 1;
}

// Length in bits of the longest common prefix of a and b.
inline unsigned kv_lcp(KeyView a, KeyView b) {
  assert(a.width == b.width);
  unsigned n = a.nwords();
  for (unsigned i = 0; i < n; i++) {
    Word x = a.w[i] ^ b.w[i];
    if (x != 0) {
      unsigned l = i * kWordBits + std::countl_zero(x);
      return std::min(l, a.width);
    }
  }
  return a.width;
}

// True iff bits [from, width) of k are all zero.
inline bool kv_low_zero(KeyView k, unsigned from) {
  assert(from <= k.width);
  if (from == k.width) return true;
  unsigned wi = from / kWordBits, rem = from % kWordBits;
  Word m = rem == 0 ? ~Word(0) : (~Word(0) >> rem);
  if ((k.w[wi] & m) != 0) return false;
  for (unsigned i = wi + 1; i < k.nwords(); i++)
    if (k.w[i] != 0) return false;
  return true;
}

// True iff bits [from, width) of k are all one.
inline bool kv_low_ones(KeyView k, unsigned from) {
  assert(from <= k.width);
  unsigned nw = k.nwords();
  for (unsigned i = from / kWordBits; i < nw; i++) {
    Word m = (i == nw - 1) ? last_word_mask(k.width) : ~Word(0);
    if (i == from / kWordBits && from % kWordBits != 0)
      m &= ~Word(0) >> (from % kWordBits);
    if ((k.w[i] & m) != m) return false;
  }
  return true;
}

// Value of bits [lo, hi) of k as an integer, saturating at kSatCount.
inline uint64_t kv_bits_range_sat(KeyView k, unsigned lo, unsigned hi) {
  assert(lo <= hi && hi <= k.width);
  if (hi - lo > 62) {
    // Saturate unless everything above the low 62 bits is zero.
    for (unsigned i = lo; i < hi - 62; i++)
      if (kv_bit(k, i)) return kSatCount;
    lo = hi - 62;
  }
  uint64_t v = 0;
  unsigned i = lo;
  while (i < hi) {
    unsigned wi = i / kWordBits, off = i % kWordBits;
    unsigned take = std::min<unsigned>(kWordBits - off, hi - i);
    Word chunk = (k.w[wi] << off) >> (kWordBits - take);
    v = (v << take) | chunk;
    i += take;
  }
  return v;
}

// Copies the top `l` bits of src into dst (width l, left aligned), zeroing
// bits past l.
inline void kv_copy_prefix(KeyView src, unsigned l, Word* dst) {
  assert(l <= src.width);
  unsigned n = words_for_bits(l);
  for (unsigned i = 0; i < n; i++) dst[i] = src.w[i];
  if (n > 0) dst[n - 1] &= last_word_mask(l);
}

// Sets bits [from, to) of a bit string to `value`.
inline void kv_fill_range(Word* w, unsigned from, unsigned to, bool value) {
  for (unsigned i = from / kWordBits; i * kWordBits < to; i++) {
    Word m = ~Word(0);
    if (i * kWordBits < from) m >>= (from - i * kWordBits);
    if ((i + 1) * kWordBits > to) {
      unsigned cut = (i + 1) * kWordBits - to;
      m = (m >> cut) << cut;
    }
    w[i] = value ? (w[i] | m) : (w[i] & ~m);
  }
}

// Increments a width-bit string in place. Returns true on wraparound.
inline bool kv_increment(Word* w, unsigned width) {
  assert(width > 0);
  unsigned n = words_for_bits(width);
  unsigned rem = width % kWordBits;
  Word add = (rem == 0) ? Word(1) : (Word(1) << (kWordBits - rem));
  for (unsigned i = n; i-- > 0;) {
    w[i] += add;
    if (w[i] >= add) return false;  // no carry out of this word
    add = 1;
  }
  return true;
}

// Adds a 64-bit offset to the width-bit integer value of the string,
// saturating at all-ones on overflow.
inline void kv_add_sat(Word* w, unsigned width, uint64_t offset) {
  assert(width > 0);
  unsigned n = words_for_bits(width);
  unsigned shift = n * kWordBits - width;  // alignment gap below the value
  unsigned __int128 wide = static_cast<unsigned __int128>(offset) << shift;
  Word lo = static_cast<Word>(wide);
  Word hi = static_cast<Word>(wide >> kWordBits);
  unsigned carry = 0;
  bool overflow = (n == 1 && hi != 0);
  for (unsigned i = n; i-- > 0;) {
    Word add = 0;
    if (i == n - 1)
      add = lo;
    else if (i == n - 2)
      add = hi;
    unsigned __int128 s = static_cast<unsigned __int128>(w[i]) + add + carry;
    w[i] = static_cast<Word>(s);
    carry = static_cast<unsigned>(s >> kWordBits);
    if (carry == 0 && i + 2 <= n && i != n - 1 && add == 0) break;
  }
  if (carry || overflow) {  // clamp to the largest representable key
    for (unsigned i = 0; i + 1 < n; i++) w[i] = ~Word(0);
    w[n - 1] = last_word_mask(width);
  }
}

// Owning fixed-width bit string.
class Key {
 public:
  Key() = default;
  explicit Key(unsigned width) : width_(width), w_(words_for_bits(width), 0) {
    if (width > kMaxKeyBits) throw std::invalid_argument("key width too large");
  }
  Key(unsigned width, std::span<const Word> words) : Key(width) {
    assert(words.size() >= w_.size());
    std::copy_n(words.begin(), w_.size(), w_.begin());
    if (!w_.empty()) w_.back() &= last_word_mask(width);
  }

  static Key from_u64(uint64_t v) {
    Key k(64);
    k.w_[0] = v;
    return k;
  }
  // Value in the low `width` bits of v, width <= 64.
  static Key from_bits(uint64_t v, unsigned width) {
    if (width > 64) throw std::invalid_argument("from_bits: width > 64");
    Key k(width);
    if (width > 0) k.w_[0] = v << (kWordBits - width);
    return k;
  }
  static Key from_bytes(std::span<const uint8_t> bytes) {
    Key k(static_cast<unsigned>(bytes.size() * 8));
    for (size_t i = 0; i < bytes.size(); i++)
      k.w_[i / 8] |= Word(bytes[i]) << (56 - 8 * (i % 8));
    return k;
  }

  unsigned width() const { return width_; }
  const Word* words() const { return w_.data(); }
  Word* words() { return w_.data(); }
  operator KeyView() const { return {w_.data(), width_}; }
  KeyView view() const { return {w_.data(), width_}; }

  uint64_t value64() const {
    assert(width_ <= 64);
    return width_ == 0 ? 0 : w_[0] >> (kWordBits - width_);
  }
  uint64_t as_u64() const {
    assert(width_ == 64);
    return w_[0];
  }

  bool operator==(const Key& o) const {
    return width_ == o.width_ && w_ == o.w_;
  }
  bool operator<(const Key& o) const { return kv_less(*this, o); }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < width_; i += 4) {
      unsigned nib = 0;
      for (unsigned j = 0; j < 4 && i + j < width_; j++)
        nib |= kv_bit(view(), i + j) << (3 - j);
      s.push_back(digits[nib]);
    }
    return s;
  }

 private:
  uint32_t width_ = 0;
  std::vector<Word> w_;
};

// Inclusive interval [left, right] over a key space. left <= right is
// enforced at construction; generators producing reversed bounds are bugs.
struct RangeQuery {
  Key left, right;

  RangeQuery(Key l, Key r) : left(std::move(l)), right(std::move(r)) {
    if (left.width() != right.width())
      throw std::invalid_argument("range bounds have different widths");
    if (kv_less(right, left))
      throw std::invalid_argument("range bounds out of order");
  }
};

struct QueryView {
  KeyView left, right;
};

// Flat, fixed-width set of keys. Cheap indexed views, no per-key allocation.
class KeySet {
 public:
  KeySet() = default;
  explicit KeySet(unsigned width)
      : width_(width), wpk_(std::max(1u, words_for_bits(width))) {}

  static KeySet from_u64(std::span<const uint64_t> vals) {
    KeySet ks(64);
    ks.w_.assign(vals.begin(), vals.end());
    ks.n_ = vals.size();
    return ks;
  }

  unsigned width() const { return width_; }
  size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  size_t words_per_key() const { return wpk_; }

  KeyView operator[](size_t i) const {
    assert(i < n_);
    return {w_.data() + i * wpk_, width_};
  }
  Key key(size_t i) const { return Key(width_, {w_.data() + i * wpk_, wpk_}); }

  void push_back(KeyView k) {
    assert(k.width == width_);
    w_.insert(w_.end(), k.w, k.w + wpk_);
    n_++;
  }
  void reserve(size_t n) { w_.reserve(n * wpk_); }

  void sort() {
    if (wpk_ == 1) {
      std::sort(w_.begin(), w_.end());
      return;
    }
    std::vector<uint32_t> idx(n_);
    for (size_t i = 0; i < n_; i++) idx[i] = static_cast<uint32_t>(i);
    std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
      return kv_less((*this)[a], (*this)[b]);
    });
    std::vector<Word> out(w_.size());
    for (size_t i = 0; i < n_; i++)
      std::copy_n(w_.data() + idx[i] * wpk_, wpk_, out.data() + i * wpk_);
    w_ = std::move(out);
  }

  bool is_sorted() const {
    for (size_t i = 1; i < n_; i++)
      if (kv_less((*this)[i], (*this)[i - 1])) return false;
    return true;
  }

  // Index of the first key >= k, assuming sorted order.
  size_t lower_bound(KeyView k) const {
    size_t lo = 0, hi = n_;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (kv_less((*this)[mid], k))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  uint32_t width_ = 0;
  size_t wpk_ = 1;
  size_t n_ = 0;
  std::vector<Word> w_;
};

// Flat set of (left, right) query bounds, all the same width.
class QuerySet {
 public:
  QuerySet() = default;
  explicit QuerySet(unsigned width)
      : width_(width), wpk_(std::max(1u, words_for_bits(width))) {}

  unsigned width() const { return width_; }
  size_t size() const { return n_; }

  QueryView operator[](size_t i) const {
    assert(i < n_);
    const Word* base = w_.data() + i * 2 * wpk_;
    return {{base, width_}, {base + wpk_, width_}};
  }

  void push(KeyView left, KeyView right) {
    assert(left.width == width_ && right.width == width_);
    if (kv_less(right, left))
      throw std::invalid_argument("query bounds out of order");
    w_.insert(w_.end(), left.w, left.w + wpk_);
    w_.insert(w_.end(), right.w, right.w + wpk_);
    n_++;
  }
  void push(const RangeQuery& q) { push(q.left, q.right); }
  void reserve(size_t n) { w_.reserve(n * 2 * wpk_); }

 private:
  uint32_t width_ = 0;
  size_t wpk_ = 1;
  size_t n_ = 0;
  std::vector<Word> w_;
};

// Fixed-size scratch buffer for intermediate key values.
struct KeyScratch {
  std::array<Word, kMaxKeyWords> w{};
  KeyView view(unsigned width) const { return {w.data(), width}; }
  Word* data() { return w.data(); }
};

}  // namespace prf
