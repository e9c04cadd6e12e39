#include <doctest.h>

#include "oracles.hpp"
#include "prf/keyspace.hpp"
#include "prf/rng.hpp"

using namespace prf;

TEST_CASE("prefix extraction") {
  CHECK(prefix(Key::from_bits(0b0100, 4), 2).value64() == 0b01);
  CHECK(prefix(Key::from_bits(0b1000, 4), 4).value64() == 0b1000);
  CHECK(prefix(Key::from_bits(0x020073, 24), 16).value64() == 0x0200);
  CHECK(prefix(Key::from_bits(0b1010, 4), 0).width() == 0);
  CHECK_THROWS_AS(prefix(Key::from_bits(1, 4), 5), std::invalid_argument);
}

TEST_CASE("prefix_count on the 4-bit [4,8] range") {
  RangeQuery q(Key::from_bits(4, 4), Key::from_bits(8, 4));
  CHECK(prefix_count(q, 1).count == 2);
  CHECK(prefix_count(q, 2).count == 2);
  CHECK(prefix_count(q, 3).count == 3);
  CHECK(prefix_count(q, 4).count == 5);
  CHECK(prefix_count(q, 3).first.value64() == 0b010);
  CHECK(prefix_count(q, 3).last.value64() == 0b100);
}

TEST_CASE("prefix_count matches enumeration and is monotone") {
  Rng rng(123);
  for (int it = 0; it < 300; it++) {
    unsigned k = 4 + rng.below(13);  // up to 16
    uint64_t lo = rng.below(uint64_t(1) << k);
    uint64_t hi = lo + rng.below((uint64_t(1) << k) - lo);
    RangeQuery q(Key::from_bits(lo, k), Key::from_bits(hi, k));
    uint64_t prev = 0;
    for (unsigned l = 1; l <= k; l++) {
      uint64_t c = prefix_count(q, l).count;
      CHECK(c == oracle::enum_prefix_count(lo, hi, k, l));
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(prefix_count(q, k).count == hi - lo + 1);
  }
}

TEST_CASE("prefix_count saturates on enormous covers") {
  RangeQuery q(Key(128), Key(128, std::vector<Word>(2, ~Word(0))));
  CHECK(prefix_count(q, 128).count == kSatCount);
  CHECK(prefix_count(q, 20).count == (uint64_t(1) << 20));
}

TEST_CASE("pad") {
  Key k = pad(std::string("ab"), 4);
  CHECK(k.width() == 32);
  CHECK(k.to_hex() == "61620000");
  CHECK(pad(std::string(""), 2).to_hex() == "0000");
  CHECK_THROWS_AS(pad(std::string("abc"), 2), std::invalid_argument);
}

TEST_CASE("interval_lcp spec cases") {
  {
    KeySet ks = oracle::to_keyset({0b1000}, 4);
    RangeQuery q(Key::from_bits(0b1001, 4), Key::from_bits(0b1011, 4));
    CHECK(interval_lcp(q, ks) == 3);
  }
  {
    KeySet ks = oracle::to_keyset({0b0000, 0b1111}, 4);
    RangeQuery q(Key::from_bits(0b0100, 4), Key::from_bits(0b1011, 4));
    CHECK(interval_lcp(q, ks) == 1);
  }
  {
    KeySet ks = oracle::to_keyset({0b1111}, 4);
    RangeQuery q(Key::from_bits(0b0000, 4), Key::from_bits(0b0111, 4));
    CHECK(interval_lcp(q, ks) == 0u);
  }
  {
    KeySet ks = oracle::to_keyset({0b0101}, 4);
    RangeQuery q(Key::from_bits(0b0100, 4), Key::from_bits(0b0110, 4));
    CHECK_THROWS_AS(interval_lcp(q, ks), NotEmptyError);
  }
}

TEST_CASE("interval_lcp equals brute-force max-pair LCP") {
  Rng rng(77);
  for (int it = 0; it < 500; it++) {
    unsigned k = 4 + rng.below(9);  // up to 12
    uint64_t space = uint64_t(1) << k;
    std::vector<uint64_t> keys;
    unsigned n = 1 + rng.below(std::min<uint64_t>(64, space / 2));
    for (unsigned i = 0; i < n; i++) keys.push_back(rng.below(space));
    KeySet ks = oracle::to_keyset(keys, k);

    uint64_t lo, hi;
    int guard = 0;
    do {
      lo = rng.below(space);
      hi = lo + rng.below(space - lo);
      if (++guard > 200) break;
    } while (!oracle::brute_empty(lo, hi, keys));
    if (!oracle::brute_empty(lo, hi, keys)) continue;

    RangeQuery q(Key::from_bits(lo, k), Key::from_bits(hi, k));
    CHECK(interval_lcp(q, ks) == oracle::brute_interval_lcp(lo, hi, k, keys));
  }
}

TEST_CASE("endpoint_analysis matches the toy hybrid example") {
  KeySet ks = oracle::to_keyset({0x00F0FF, 0x020011, 0x0200AA, 0x030000}, 24);
  RangeQuery q(Key::from_bits(0x020073, 24), Key::from_bits(0x02009C, 24));
  EndpointAnalysis ea = endpoint_analysis(QueryView{q.left, q.right}, ks, 16, 20);
  CHECK(ea.i2);
  CHECK_FALSE(ea.i3);
  CHECK(ea.l_size == 3);  // 0x02007, 0x02008, 0x02009
  CHECK(ea.r_size == 0);
  CHECK(probe_regions(ea) == 3);
}

TEST_CASE("endpoint_analysis agrees with set enumeration") {
  Rng rng(4242);
  int checked = 0;
  while (checked < 200) {
    unsigned k = 5 + rng.below(8);  // up to 12
    uint64_t space = uint64_t(1) << k;
    std::vector<uint64_t> keys;
    unsigned n = 1 + rng.below(40);
    for (unsigned i = 0; i < n; i++) keys.push_back(rng.below(space));
    KeySet ks = oracle::to_keyset(keys, k);

    uint64_t lo = rng.below(space);
    uint64_t hi = lo + rng.below(space - lo);
    if (!oracle::brute_empty(lo, hi, keys)) continue;
    checked++;
    QueryView q{Key::from_bits(lo, k), Key::from_bits(hi, k)};
    Key lk = Key::from_bits(lo, k), hk = Key::from_bits(hi, k);
    q = {lk, hk};
    for (unsigned l1 = 1; l1 < k; l1++) {
      for (unsigned l2 = l1 + 1; l2 <= k; l2++) {
        EndpointAnalysis ea = endpoint_analysis(q, ks, l1, l2);
        auto ref = oracle::brute_endpoint_analysis(lo, hi, k, keys, l1, l2);
        CHECK(ea.i0 == ref.i0);
        CHECK(ea.i1 == ref.i1);
        CHECK(ea.i2 == ref.i2);
        CHECK(ea.i3 == ref.i3);
        // the built-in analysis counts geometric capacity; the oracle counts
        // only covered prefixes, which agree on the end regions
        CHECK(ea.l_size == ref.l_size);
        CHECK(ea.r_size == ref.r_size);
        // an empty query cannot have a contained region whose prefix is a
        // key prefix
        CHECK_FALSE((!ea.i0 && ea.i2));
        CHECK_FALSE((!ea.i1 && ea.i3));
      }
    }
  }
}

TEST_CASE("bit-string helpers") {
  SUBCASE("increment carries across words") {
    Key k(80);
    kv_fill_range(k.words(), 0, 80, true);
    kv_fill_range(k.words(), 0, 1, false);  // 0111...1
    CHECK_FALSE(kv_increment(k.words(), 80));
    CHECK(kv_bit(k, 0) == 1);
    for (unsigned i = 1; i < 80; i++) CHECK(kv_bit(k, i) == 0);
    kv_fill_range(k.words(), 0, 80, true);
    CHECK(kv_increment(k.words(), 80));  // wraps
  }
  SUBCASE("add saturates at the top of the space") {
    Key k = Key::from_u64(~uint64_t(0) - 5);
    kv_add_sat(k.words(), 64, 100);
    CHECK(k.as_u64() == ~uint64_t(0));
    Key s(80);
    kv_fill_range(s.words(), 0, 80, true);
    kv_add_sat(s.words(), 80, 1);
    CHECK(kv_low_ones(s, 0));
  }
  SUBCASE("add lands at the value LSB for padded widths") {
    Key k(80);  // zero
    kv_add_sat(k.words(), 80, 3);
    CHECK(kv_bit(k, 78) == 1);
    CHECK(kv_bit(k, 79) == 1);
    CHECK(kv_bits_range_sat(k, 0, 78) == 0);
  }
  SUBCASE("lcp and range reads") {
    Key a = Key::from_u64(0xFF00000000000000ULL);
    Key b = Key::from_u64(0xFE00000000000000ULL);
    CHECK(kv_lcp(a, b) == 7);
    CHECK(kv_bits_range_sat(a, 0, 8) == 0xFF);
    CHECK(kv_bits_range_sat(a, 4, 12) == 0xF0);
  }
}

TEST_CASE("query bounds are validated at parse time") {
  CHECK_THROWS_AS(
      RangeQuery(Key::from_bits(5, 4), Key::from_bits(4, 4)),
      std::invalid_argument);
  QuerySet qs(4);
  CHECK_THROWS_AS(qs.push(Key::from_bits(5, 4), Key::from_bits(4, 4)),
                  std::invalid_argument);
}
