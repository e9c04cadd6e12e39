#pragma once

#include <cstdint>
#include <vector>

#include "prf/bloom.hpp"
#include "prf/filters.hpp"
#include "prf/keyspace.hpp"
#include "prf/rng.hpp"
#include "prf/trie_cost.hpp"

namespace prf {

// counts[l] = number of distinct l-bit key prefixes, l = 0..k.
struct KeyPrefixCounts {
  std::vector<uint64_t> counts;
  unsigned width() const { return static_cast<unsigned>(counts.size()) - 1; }
  uint64_t unique_keys() const { return counts.back(); }
};

KeyPrefixCounts count_key_prefixes(const KeySet& keys);

// Sample-query statistics: each empty query's bounds plus its LCP geometry
// against the key set. Queries are held sorted by left bound; extraction
// walks the key set with a cursor instead of independent binary searches.
class SampleStats {
 public:
  static SampleStats extract(const KeySet& keys, const QuerySet& sample);

  size_t size() const { return nb_.size(); }
  unsigned width() const { return queries_.width(); }
  QueryView query(size_t i) const { return queries_[i]; }
  const NeighborLcps& lcps(size_t i) const { return nb_[i]; }

 private:
  QuerySet queries_;
  std::vector<NeighborLcps> nb_;
};

// Exponentially binned per-design probe counts. Bin 0 counts queries the
// trie resolves outright; bin i >= 1 aggregates queries whose Bloom probe
// count lands in [2^(i-1), 2^i); `guaranteed` counts queries that collide
// with a stored prefix no matter what.
struct QueryBins {
  uint64_t trie_resolved = 0;
  uint64_t guaranteed = 0;
  std::vector<std::pair<uint64_t, uint64_t>> bins;  // (count, probe-count sum)

  uint64_t total() const {
    uint64_t t = trie_resolved + guaranteed;
    for (auto& [c, s] : bins) t += c;
    return t;
  }
};

// Bin index for a probe count n >= 1: ceil(log2(n + 1)), clamped to k.
inline unsigned bin_index(uint64_t n_regions, unsigned k) {
  unsigned i = static_cast<unsigned>(std::bit_width(n_regions));
  return std::min(i, k);
}

QueryBins bin_queries(const SampleStats& stats, unsigned l1, unsigned l2);

// --------------------------------------------------------------------------
// Closed-form per-query false positive probabilities.

// Single prefix Bloom filter at length l with per-probe FPR p.
double fpr_1pbf(unsigned min_len, uint64_t cover_count, unsigned l, double p);
double fpr_1pbf(const SampleStats& stats, size_t i, unsigned l, double p);

// Trie (depth l1) + Bloom (length l2) hybrid with Bloom per-probe FPR p.
// l1 == 0 degenerates to the single-filter form.
double fpr_proteus(unsigned min_len, uint64_t n_regions, unsigned l1,
                   unsigned l2, double p);
double fpr_proteus(const SampleStats& stats, size_t i, unsigned l1, unsigned l2,
                   double p);

// Per-query geometry feeding the two-filter formula, in the exact shape the
// formula consumes (complement-sense exponents, single-region special case).
struct TwoPbfShape {
  bool guaranteed = false;  // l2 <= lcp(Q, K)
  int64_t n_mid = 0;        // |Q_l1| - I0 - I1; may be -1 (empty sum)
  bool i0 = false, i1 = false;
  unsigned i2_exp = 0, i3_exp = 0;  // exponents of p1 in the end-region terms
  uint64_t l_count = 0, r_count = 0;
  uint64_t width2 = 0;  // 2^(l2-l1), saturating
};

TwoPbfShape two_pbf_shape(QueryView q, const NeighborLcps& nb, unsigned l1,
                          unsigned l2);

// Two stacked prefix Bloom filters. Evaluates the additive end-term /
// binomial-sum decomposition as given, clamped to [0, 1]; the Monte Carlo
// oracle quantifies its gap from the true product-form probability.
double fpr_2pbf(const TwoPbfShape& shape, double p1, double p2);
double fpr_2pbf(const SampleStats& stats, size_t i, unsigned l1, unsigned l2,
                double p1, double p2);

// The binomial sum inside fpr_2pbf, exposed for dual-route testing: direct
// log-space summation (log-gamma PMF) for small n, algebraically identical
// closed form beyond.
double binomial_negative_sum(int64_t n, double p1, double log_q2,
                             bool force_direct = false);

// --------------------------------------------------------------------------
// Monte Carlo oracle: literal per-probe simulation with independent
// Bernoulli collisions.

struct McResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// n_regions independent probes, each colliding with probability p.
McResult mc_oracle_regions(uint64_t n_regions, double p, uint64_t trials,
                           Rng& rng);

// Operational probe structure of a two-filter query (simulation side).
struct TwoPbfProbe {
  uint64_t n_mid = 0;   // fully contained coarse regions, prefix absent
  uint64_t width2 = 0;  // fine probes per colliding coarse region
  bool left_end = false, left_present = false;
  uint64_t left_probes = 0;
  bool right_end = false, right_present = false;
  uint64_t right_probes = 0;
};

TwoPbfProbe two_pbf_probe(QueryView q, const NeighborLcps& nb, unsigned l1,
                          unsigned l2);

McResult mc_oracle_2pbf(const TwoPbfProbe& probe, double p1, double p2,
                        uint64_t trials, Rng& rng);

// --------------------------------------------------------------------------
// Design selection.

struct ModelVerdict {
  DesignPoint chosen;
  double expected_fpr = 1.0;
  std::vector<std::pair<DesignPoint, double>> per_design;
};

struct SelectOptions {
  // Keep a later-enumerated design on ties (<=); set for strict improvement.
  bool strict_ties = false;
  // 0 = model every Bloom prefix length; otherwise a uniformly spaced subset
  // of this size (coarse search for long keys).
  unsigned max_bloom_lengths = 0;
};

// Candidate Bloom prefix lengths in [1, k].
std::vector<unsigned> bloom_length_grid(unsigned k, unsigned max_lengths);

ModelVerdict select_design(const KeyPrefixCounts& counts,
                           const SampleStats& stats, uint64_t budget_bits,
                           FilterFamily family, const SelectOptions& opt = {});
ModelVerdict select_design(const KeySet& keys, const QuerySet& sample,
                           uint64_t budget_bits, FilterFamily family,
                           const SelectOptions& opt = {});

// Batch FPR of one design from its bins (summed in ascending bin order).
double design_fpr_binned(const QueryBins& bins, double p, uint64_t sample_size);

// Unbinned reference: mean of the per-query closed forms.
double design_fpr_exact(const SampleStats& stats, unsigned l1, unsigned l2,
                        double p);

// Estimated trie size; thin wrapper so model callers share the encoder's
// cost constants.
inline uint64_t trie_mem(unsigned l1, const KeyPrefixCounts& counts) {
  return trie_mem(l1, std::span<const uint64_t>(counts.counts));
}

// Failure probability bound for an FPR estimate from N samples at absolute
// error delta, for true rates up to p_max. Clamped to [0, 1].
double chernoff_bound(double n_samples, double delta, double p_max);

}  // namespace prf
