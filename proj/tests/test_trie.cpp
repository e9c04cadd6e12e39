#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "prf/bitvec.hpp"
#include "prf/cpfpr.hpp"
#include "prf/rng.hpp"
#include "prf/trie.hpp"

using namespace prf;

TEST_CASE("bitvec rank and select against a naive scan") {
  Rng rng(42);
  for (int round = 0; round < 10; round++) {
    uint64_t n = 1 + rng.below(3000);
    BitVec bv;
    std::vector<bool> ref;
    for (uint64_t i = 0; i < n; i++) {
      bool b = rng.bernoulli(0.3);
      bv.push_back(b);
      ref.push_back(b);
    }
    bv.freeze();
    uint64_t ones = 0;
    for (uint64_t i = 0; i <= n; i++) {
      CHECK(bv.rank1(i) == ones);
      if (i < n && ref[i]) ones++;
    }
    uint64_t j = 0;
    for (uint64_t i = 0; i < n; i++) {
      if (!ref[i]) continue;
      j++;
      CHECK(bv.select1(j) == i);
    }
  }
}

TEST_CASE("exact membership on a two-prefix set") {
  KeySet ps(2);
  ps.push_back(Key::from_bits(0b00, 2));
  ps.push_back(Key::from_bits(0b10, 2));
  UniformTrie t = UniformTrie::build(ps, 0);
  CHECK(t.collect_range(Key::from_bits(0b01, 2), Key::from_bits(0b01, 2)).empty());
  auto hits = t.collect_range(Key::from_bits(0b01, 2), Key::from_bits(0b11, 2));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].value64() == 0b10);
  CHECK(t.contains(Key::from_bits(0b00, 2)));
  CHECK_FALSE(t.contains(Key::from_bits(0b01, 2)));
  CHECK_THROWS_AS(UniformTrie::build(KeySet(4), 0), std::invalid_argument);
}

TEST_CASE("range probe covers the full set in order") {
  Rng rng(1234);
  for (int round = 0; round < 200; round++) {
    unsigned l1 = 2 + rng.below(11);  // up to 12
    uint64_t space = uint64_t(1) << l1;
    std::vector<uint64_t> prefixes;
    unsigned n = 1 + rng.below(std::min<uint64_t>(200, space));
    for (unsigned i = 0; i < n; i++) prefixes.push_back(rng.below(space));
    std::sort(prefixes.begin(), prefixes.end());
    prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
    KeySet ps = oracle::to_keyset(prefixes, l1);
    unsigned cutoff = rng.below(l1 + 1);
    UniformTrie t = UniformTrie::build(ps, cutoff);

    // exhaustive membership
    for (uint64_t v = 0; v < space; v++) {
      bool expect = std::binary_search(prefixes.begin(), prefixes.end(), v);
      CHECK(t.contains(Key::from_bits(v, l1)) == expect);
    }
    // random covers vs brute intersection, ascending order
    for (int probe = 0; probe < 10; probe++) {
      uint64_t lo = rng.below(space);
      uint64_t hi = lo + rng.below(space - lo);
      auto got = t.collect_range(Key::from_bits(lo, l1), Key::from_bits(hi, l1));
      auto want = oracle::brute_range_members(lo, hi, prefixes);
      REQUIRE(got.size() == want.size());
      for (size_t i = 0; i < got.size(); i++) CHECK(got[i].value64() == want[i]);
      for (size_t i = 1; i < got.size(); i++)
        CHECK(got[i - 1].value64() < got[i].value64());
    }
  }
}

TEST_CASE("deep tries store single-key branches as suffixes") {
  Rng rng(99);
  std::vector<uint64_t> vals;
  for (int i = 0; i < 300; i++) vals.push_back(rng.next());
  KeySet keys = oracle::to_keyset(vals, 64);
  UniformTrie t = UniformTrie::build_from_keys(keys, 64, 8);
  for (size_t i = 0; i < keys.size(); i++) CHECK(t.contains(keys[i]));
  for (int i = 0; i < 1000; i++) {
    uint64_t v = rng.next();
    bool expect = std::binary_search(vals.begin(), vals.end(), v);
    CHECK(t.contains(Key::from_u64(v)) == expect);
  }
  // a full-width cover returns everything
  auto all = t.collect_range(Key::from_u64(0), Key::from_u64(~uint64_t(0)));
  CHECK(all.size() == keys.size());
}

TEST_CASE("early-stop probing visits a prefix of the match sequence") {
  KeySet ps(4);
  for (uint64_t v : {1, 4, 9, 12}) ps.push_back(Key::from_bits(v, 4));
  UniformTrie t = UniformTrie::build(ps, 2);
  int seen = 0;
  bool stopped = t.for_each_in_range(Key::from_bits(0, 4), Key::from_bits(15, 4),
                                     [&](KeyView) { return ++seen == 2; });
  CHECK(stopped);
  CHECK(seen == 2);
}

TEST_CASE("single-prefix trie has the documented footprint") {
  KeySet ps(1);
  ps.push_back(Key::from_bits(1, 1));
  UniformTrie t = UniformTrie::build(ps, plan_trie(1, std::vector<uint64_t>{1, 1}).dense_cutoff);
  // one dense level (two 2-bit bitmaps with their rank blocks and length
  // registers), empty suffix store, per-level and header registers
  CHECK(t.size_bits() == 704);
}

TEST_CASE("size is monotone when a prefix is added") {
  Rng rng(7);
  for (int round = 0; round < 50; round++) {
    unsigned l1 = 3 + rng.below(10);
    uint64_t space = uint64_t(1) << l1;
    std::set<uint64_t> s;
    unsigned n = 1 + rng.below(std::min<uint64_t>(60, space - 1));
    while (s.size() < n) s.insert(rng.below(space));
    uint64_t extra;
    do {
      extra = rng.below(space);
    } while (s.count(extra));

    std::vector<uint64_t> base(s.begin(), s.end());
    std::vector<uint64_t> grown = base;
    grown.push_back(extra);
    unsigned cutoff = rng.below(l1 + 1);
    uint64_t small =
        UniformTrie::build(oracle::to_keyset(base, l1), cutoff).size_bits();
    uint64_t big =
        UniformTrie::build(oracle::to_keyset(grown, l1), cutoff).size_bits();
    CHECK(small <= big);
  }
}

TEST_CASE("built size never exceeds the planning estimate") {
  Rng rng(555);
  for (int round = 0; round < 100; round++) {
    unsigned n = 1 + rng.below(3000);
    std::vector<uint64_t> vals;
    bool clustered = rng.bernoulli(0.5);
    for (unsigned i = 0; i < n; i++)
      vals.push_back(clustered ? (uint64_t(0xABCD) << 48) + rng.below(1 << 20)
                               : rng.next());
    KeySet keys = oracle::to_keyset(vals, 64);
    KeyPrefixCounts counts = count_key_prefixes(keys);
    for (unsigned l1 = 4; l1 <= 24; l1 += 5) {
      TriePlan plan = plan_trie(l1, counts.counts);
      UniformTrie t = UniformTrie::build_from_keys(keys, l1, plan.dense_cutoff);
      CHECK(t.size_bits() <= plan.bits);
    }
  }
}
