#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "prf/bloom.hpp"
#include "prf/errors.hpp"
#include "prf/key.hpp"
#include "prf/trie.hpp"

namespace prf {

enum class FilterFamily { kProteus, kOnePbf, kTwoPbf };

const char* family_name(FilterFamily f);
FilterFamily family_from_name(const std::string& name);

// One point in the prefix-filter design space.
//   Proteus: l1 = trie depth (0 = no trie), l2 = Bloom prefix length
//            (0 = no Bloom filter); l1 < l2 when both are nonzero.
//   1PBF:    l2 = the single prefix length, l1 unused.
//   2PBF:    l1 < l2 are the two Bloom prefix lengths; memory_split is the
//            budget share of the l1 filter.
struct DesignPoint {
  unsigned l1 = 0;
  unsigned l2 = 0;
  double memory_split = 0.5;
  uint64_t budget_bits = 0;

  bool operator==(const DesignPoint&) const = default;
};

struct QueryOutcome {
  bool positive = false;
  uint64_t trie_probes = 0;   // 2PBF reports its coarse-filter probes here
  uint64_t bloom_probes = 0;
};

// Options shared by the query paths. `trace` collects every Bloom-probed
// prefix; `short_circuit=false` forces a full scan (verdict must not change,
// only probe counts).
struct QueryOptions {
  bool short_circuit = true;
  std::vector<Key>* trace = nullptr;
};

// Trie + prefix Bloom hybrid. Either component may be absent; with no trie
// it degenerates to a plain prefix Bloom filter, with no Bloom filter to a
// deterministic prefix set.
class ProteusFilter {
 public:
  static ProteusFilter build(const KeySet& keys, const DesignPoint& design,
                             uint64_t seed);

  QueryOutcome query(QueryView q, const QueryOptions& opt = {}) const;
  QueryOutcome query(const RangeQuery& q, const QueryOptions& opt = {}) const {
    return query(QueryView{q.left, q.right}, opt);
  }

  uint64_t size_bits() const;
  const DesignPoint& design() const { return design_; }
  unsigned key_width() const { return key_width_; }
  const UniformTrie* trie() const { return trie_ ? &*trie_ : nullptr; }
  const BloomFilter* bloom() const { return bloom_ ? &*bloom_ : nullptr; }

 private:
  DesignPoint design_;
  unsigned key_width_ = 0;
  std::optional<UniformTrie> trie_;
  std::optional<BloomFilter> bloom_;
};

// Single prefix Bloom filter over length-l2 prefixes.
class OnePbfFilter {
 public:
  static OnePbfFilter build(const KeySet& keys, const DesignPoint& design,
                            uint64_t seed);

  QueryOutcome query(QueryView q, const QueryOptions& opt = {}) const;
  QueryOutcome query(const RangeQuery& q, const QueryOptions& opt = {}) const {
    return query(QueryView{q.left, q.right}, opt);
  }

  uint64_t size_bits() const { return bloom_->size_bits(); }
  const DesignPoint& design() const { return design_; }
  const BloomFilter& bloom() const { return *bloom_; }

 private:
  DesignPoint design_;
  unsigned key_width_ = 0;
  std::optional<BloomFilter> bloom_;
};

// Two stacked prefix Bloom filters: the short one gates, the long one
// resolves.
class TwoPbfFilter {
 public:
  static TwoPbfFilter build(const KeySet& keys, const DesignPoint& design,
                            uint64_t seed);

  QueryOutcome query(QueryView q, const QueryOptions& opt = {}) const;
  QueryOutcome query(const RangeQuery& q, const QueryOptions& opt = {}) const {
    return query(QueryView{q.left, q.right}, opt);
  }

  uint64_t size_bits() const { return bf1_->size_bits() + bf2_->size_bits(); }
  const DesignPoint& design() const { return design_; }

 private:
  DesignPoint design_;
  unsigned key_width_ = 0;
  std::optional<BloomFilter> bf1_, bf2_;
};

// Type-erased handle so the harness can treat families uniformly.
class AnyFilter {
 public:
  AnyFilter() = default;
  static AnyFilter build(FilterFamily family, const KeySet& keys,
                         const DesignPoint& design, uint64_t seed);
  QueryOutcome query(QueryView q, const QueryOptions& opt = {}) const;
  uint64_t size_bits() const;
  FilterFamily family() const { return family_; }
  const DesignPoint& design() const;

 private:
  FilterFamily family_ = FilterFamily::kProteus;
  std::shared_ptr<ProteusFilter> proteus_;
  std::shared_ptr<OnePbfFilter> pbf1_;
  std::shared_ptr<TwoPbfFilter> pbf2_;
};

}  // namespace prf
