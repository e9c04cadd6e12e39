#include <doctest.h>

#include <cmath>

#include "prf/bloom.hpp"
#include "prf/rng.hpp"

using namespace prf;

TEST_CASE("bloom_plan") {
  SUBCASE("uncapped hash count") {
    BloomPlan p = bloom_plan(1000000, 100000);  // m/n = 10
    CHECK(p.hashes == 7);
    CHECK(p.fpr == doctest::Approx(std::pow(1.0 - std::exp(-0.7), 7)));
  }
  SUBCASE("no memory") {
    BloomPlan p = bloom_plan(0, 10);
    CHECK(p.hashes == 0);
    CHECK(p.fpr == 1.0);
  }
  SUBCASE("cap at 32 hashes") {
    BloomPlan p = bloom_plan(6400, 100);  // m/n = 64 -> ceil(44.4) capped
    CHECK(p.hashes == 32);
    CHECK(p.fpr == doctest::Approx(std::pow(1.0 - std::exp(-0.5), 32)));
  }
  SUBCASE("tiny budgets still hash once") {
    CHECK(bloom_plan(1, 1000).hashes == 1);
  }
  CHECK_THROWS_AS(bloom_plan(100, 0), std::invalid_argument);
}

TEST_CASE("insert/query basics") {
  BloomFilter f(1024, 3, 16, 99);
  Key a = Key::from_bits(0xABCD, 16);
  Key b = Key::from_bits(0x1234, 16);
  CHECK_FALSE(f.query(a));  // empty filter
  f.insert(a);
  f.freeze();
  CHECK(f.query(a));
  CHECK_THROWS_AS(f.query(Key::from_bits(1, 8)), std::invalid_argument);
  (void)b;
}

TEST_CASE("no false negatives over random inserts") {
  Rng rng(2024);
  for (int round = 0; round < 100; round++) {
    uint64_t n = 100 + rng.below(2000);
    BloomFilter f(n * 8, n, 64, rng.next());
    std::vector<uint64_t> vals;
    for (uint64_t i = 0; i < n; i++) {
      vals.push_back(rng.next());
      f.insert(Key::from_u64(vals.back()));
    }
    f.freeze();
    for (uint64_t v : vals) CHECK(f.query(Key::from_u64(v)));
  }
}

TEST_CASE("determinism: same seed and inserts give identical bits") {
  auto build = [] {
    BloomFilter f(4096, 100, 64, 7777);
    for (uint64_t i = 0; i < 100; i++) f.insert(Key::from_u64(i * 0x9e3779b9));
    f.freeze();
    return f;
  };
  CHECK(build().bits() == build().bits());
}

TEST_CASE("empirical FPR brackets the planned value") {
  const uint64_t n = 100000, probes = 100000;
  for (uint64_t mn : {6, 8, 10, 14}) {
    Rng rng(5000 + mn);
    BloomFilter f(mn * n, n, 64, 31337);
    // insert even values, probe odd ones: disjoint by construction
    for (uint64_t i = 0; i < n; i++)
      f.insert(Key::from_u64(rng.next() << 1));
    f.freeze();
    uint64_t fp = 0;
    for (uint64_t i = 0; i < probes; i++)
      if (f.query(Key::from_u64((rng.next() << 1) | 1))) fp++;
    double observed = double(fp) / double(probes);
    double planned = f.planned_fpr();
    CHECK(observed >= 0.5 * planned);
    CHECK(observed <= 1.5 * planned);
  }
}
