#include "prf/cpfpr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prf {

KeyPrefixCounts count_key_prefixes(const KeySet& keys) {
  return KeyPrefixCounts{prefix_count_table(keys)};
}

SampleStats SampleStats::extract(const KeySet& keys, const QuerySet& sample) {
  assert(keys.is_sorted());
  SampleStats st;
  st.queries_ = QuerySet(sample.width());
  st.queries_.reserve(sample.size());

  std::vector<uint32_t> idx(sample.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
    return kv_less(sample[a].left, sample[b].left);
  });
  for (uint32_t i : idx) st.queries_.push(sample[i].left, sample[i].right);

  st.nb_.reserve(sample.size());
  size_t hint = 0;
  for (size_t i = 0; i < st.queries_.size(); i++)
    st.nb_.push_back(neighbor_lcps(st.queries_[i], keys, &hint));
  return st;
}

// --------------------------------------------------------------------------
// Closed forms

namespace {

// 1 - (1-p)^n without underflow.
double prob_any(uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  long double lg = static_cast<long double>(n) * log1pl(-(long double)p);
  return static_cast<double>(1.0L - expl(lg));
}

}  // namespace

double fpr_1pbf(unsigned min_len, uint64_t cover_count, unsigned l, double p) {
  if (l <= min_len) return 1.0;
  return prob_any(cover_count, p);
}

double fpr_1pbf(const SampleStats& stats, size_t i, unsigned l, double p) {
  const NeighborLcps& nb = stats.lcps(i);
  if (l <= nb.min_len) return 1.0;
  QueryView q = stats.query(i);
  return prob_any(sat_cover_count(q.left, q.right, l), p);
}

double fpr_proteus(unsigned min_len, uint64_t n_regions, unsigned l1,
                   unsigned l2, double p) {
  if (l1 > 0 && min_len < l1) return 0.0;
  if (l2 == 0) return 1.0;  // trie alone and the trie did not resolve it
  if (l2 <= min_len) return 1.0;
  return prob_any(n_regions, p);
}

double fpr_proteus(const SampleStats& stats, size_t i, unsigned l1, unsigned l2,
                   double p) {
  const NeighborLcps& nb = stats.lcps(i);
  QueryView q = stats.query(i);
  if (l1 > 0 && nb.min_len < l1) return 0.0;
  if (l2 == 0) return 1.0;
  if (l2 <= nb.min_len) return 1.0;
  uint64_t nr;
  if (l1 == 0) {
    nr = sat_cover_count(q.left, q.right, l2);
  } else {
    nr = probe_regions(endpoint_analysis(q, nb, l1, l2));
  }
  return prob_any(nr, p);
}

TwoPbfShape two_pbf_shape(QueryView q, const NeighborLcps& nb, unsigned l1,
                          unsigned l2) {
  TwoPbfShape s;
  if (l2 <= nb.min_len) {
    s.guaranteed = true;
    return s;
  }
  unsigned w = l2 - l1;
  s.width2 = w >= 62 ? kSatCount : (uint64_t(1) << w);
  bool single = l1 <= nb.qlcp;
  if (single) {
    bool contained = kv_low_zero(q.left, l1) && kv_low_ones(q.right, l1);
    s.i0 = s.i1 = !contained;
    bool present = nb.min_len >= l1;
    s.i2_exp = 1;  // covers both the absent case and the single-region rule
    s.i3_exp = present ? 0 : 1;
    s.l_count = s.r_count = sat_cover_count(q.left, q.right, l2);
    s.n_mid = 1 - (s.i0 ? 1 : 0) - (s.i1 ? 1 : 0);
  } else {
    s.i0 = !kv_low_zero(q.left, l1);
    s.i1 = !kv_low_ones(q.right, l1);
    s.i2_exp = nb.lcp_left >= l1 ? 0 : 1;
    s.i3_exp = nb.lcp_right >= l1 ? 0 : 1;
    uint64_t low_l = kv_bits_range_sat(q.left, l1, l2);
    uint64_t low_r = kv_bits_range_sat(q.right, l1, l2);
    s.l_count = s.width2 >= kSatCount ? kSatCount : s.width2 - low_l;
    s.r_count = std::min(low_r + 1, kSatCount);
    uint64_t ql1 = sat_cover_count(q.left, q.right, l1);
    int64_t mid = static_cast<int64_t>(std::min(ql1, kSatCount));
    s.n_mid = mid - (s.i0 ? 1 : 0) - (s.i1 ? 1 : 0);
  }
  return s;
}

double binomial_negative_sum(int64_t n, double p1, double log_q2,
                             bool force_direct) {
  if (n < 0) return 0.0;
  if (n == 0) return 1.0;
  constexpr int64_t kDirectLimit = 4096;
  bool interior = p1 > 0.0 && p1 < 1.0;
  if (!force_direct && (n > kDirectLimit || !interior)) {
    long double q2 = expl(static_cast<long double>(log_q2));
    long double base = 1.0L - (long double)p1 + (long double)p1 * q2;
    if (base <= 0.0L) return 0.0;
    return static_cast<double>(expl(static_cast<long double>(n) * logl(base)));
  }
  // Direct evaluation: each binomial PMF term in log space so n in the
  // billions cannot overflow the coefficient.
  long double lp = logl((long double)p1);
  long double l1p = log1pl(-(long double)p1);
  long double lg_n = lgammal(static_cast<long double>(n) + 1.0L);
  long double sum = 0.0L;
  for (int64_t i = 0; i <= n; i++) {
    long double lg = lg_n - lgammal((long double)i + 1.0L) -
                     lgammal((long double)(n - i) + 1.0L) +
                     (long double)i * lp + (long double)(n - i) * l1p;
    if (i > 0) lg += (long double)i * (long double)log_q2;
    sum += expl(lg);
  }
  return static_cast<double>(sum);
}

double fpr_2pbf(const TwoPbfShape& s, double p1, double p2) {
  if (s.guaranteed) return 1.0;
  long double neg_l = powl((long double)p1, (long double)s.i2_exp) *
                      (s.i0 ? 1.0L : 0.0L) *
                      expl((long double)s.l_count * log1pl(-(long double)p2));
  long double neg_r = powl((long double)p1, (long double)s.i3_exp) *
                      (s.i1 ? 1.0L : 0.0L) *
                      expl((long double)s.r_count * log1pl(-(long double)p2));
  double log_q2 = static_cast<double>((long double)s.width2 *
                                      log1pl(-(long double)p2));
  long double sum = binomial_negative_sum(s.n_mid, p1, log_q2);
  long double fp = 1.0L - neg_l - neg_r - sum;
  if (fp < 0.0L) return 0.0;
  if (fp > 1.0L) return 1.0;
  return static_cast<double>(fp);
}

double fpr_2pbf(const SampleStats& stats, size_t i, unsigned l1, unsigned l2,
                double p1, double p2) {
  return fpr_2pbf(two_pbf_shape(stats.query(i), stats.lcps(i), l1, l2), p1, p2);
}

// --------------------------------------------------------------------------
// Monte Carlo oracle

McResult mc_oracle_regions(uint64_t n_regions, double p, uint64_t trials,
                           Rng& rng) {
  uint64_t positives = 0;
  for (uint64_t t = 0; t < trials; t++) {
    for (uint64_t i = 0; i < n_regions; i++) {
      if (rng.uniform01() < p) {
        positives++;
        break;
      }
    }
  }
  McResult r;
  r.estimate = static_cast<double>(positives) / static_cast<double>(trials);
  r.stderr_ = std::sqrt(r.estimate * (1.0 - r.estimate) /
                        static_cast<double>(trials));
  return r;
}

TwoPbfProbe two_pbf_probe(QueryView q, const NeighborLcps& nb, unsigned l1,
                          unsigned l2) {
  TwoPbfProbe pr;
  unsigned w = l2 - l1;
  pr.width2 = w >= 62 ? kSatCount : (uint64_t(1) << w);
  bool single = l1 <= nb.qlcp;
  if (single) {
    bool contained = kv_low_zero(q.left, l1) && kv_low_ones(q.right, l1);
    if (contained) {
      pr.n_mid = 1;  // the whole query is one absent, fully-covered region
    } else {
      pr.left_end = true;
      pr.left_present = nb.min_len >= l1;
      pr.left_probes = sat_cover_count(q.left, q.right, l2);
    }
    return pr;
  }
  bool i0 = !kv_low_zero(q.left, l1);
  bool i1 = !kv_low_ones(q.right, l1);
  uint64_t ql1 = sat_cover_count(q.left, q.right, l1);
  pr.n_mid = ql1 - (i0 ? 1 : 0) - (i1 ? 1 : 0);
  uint64_t low_l = kv_bits_range_sat(q.left, l1, l2);
  uint64_t low_r = kv_bits_range_sat(q.right, l1, l2);
  pr.left_end = i0;
  pr.left_present = nb.lcp_left >= l1;
  pr.left_probes = pr.width2 >= kSatCount ? kSatCount : pr.width2 - low_l;
  pr.right_end = i1;
  pr.right_present = nb.lcp_right >= l1;
  pr.right_probes = std::min(low_r + 1, kSatCount);
  return pr;
}

McResult mc_oracle_2pbf(const TwoPbfProbe& probe, double p1, double p2,
                        uint64_t trials, Rng& rng) {
  auto fine_hits = [&](uint64_t n) {
    for (uint64_t i = 0; i < n; i++)
      if (rng.uniform01() < p2) return true;
    return false;
  };
  uint64_t positives = 0;
  for (uint64_t t = 0; t < trials; t++) {
    bool pos = false;
    if (probe.left_end && (probe.left_present || rng.uniform01() < p1))
      pos = fine_hits(probe.left_probes);
    for (uint64_t r = 0; !pos && r < probe.n_mid; r++)
      if (rng.uniform01() < p1) pos = fine_hits(probe.width2);
    if (!pos && probe.right_end &&
        (probe.right_present || rng.uniform01() < p1))
      pos = fine_hits(probe.right_probes);
    if (pos) positives++;
  }
  McResult r;
  r.estimate = static_cast<double>(positives) / static_cast<double>(trials);
  r.stderr_ = std::sqrt(r.estimate * (1.0 - r.estimate) /
                        static_cast<double>(trials));
  return r;
}

// --------------------------------------------------------------------------
// Binning and selection

namespace {

// Incremental cover geometry while stepping the Bloom length upward.
struct CoverWalk {
  bool whole = false;  // probe count is the full |Q_l2|
  uint64_t c = 0;
  uint64_t pow2 = 0, low_l = 0, low_r = 0;
  unsigned l2 = 0;

  void init(QueryView q, unsigned l1, bool single_region, unsigned start_l2) {
    l2 = start_l2;
    whole = (l1 == 0) || single_region;
    if (whole) {
      c = sat_cover_count(q.left, q.right, start_l2);
    } else {
      low_l = kv_bits_range_sat(q.left, l1, start_l2);
      low_r = kv_bits_range_sat(q.right, l1, start_l2);
      unsigned w = start_l2 - l1;
      pow2 = w >= 62 ? kSatCount : (uint64_t(1) << w);
    }
  }

  void step(QueryView q) {
    uint64_t bl = kv_bit(q.left, l2);
    uint64_t br = kv_bit(q.right, l2);
    if (whole) {
      c = (c >= kSatCount / 2) ? kSatCount : 2 * c - 1 + br - bl;
    } else {
      low_l = (low_l >= kSatCount / 2) ? kSatCount : 2 * low_l + bl;
      low_r = (low_r >= kSatCount / 2) ? kSatCount : 2 * low_r + br;
      pow2 = (pow2 >= kSatCount / 2) ? kSatCount : 2 * pow2;
    }
    l2++;
  }

  uint64_t regions(bool i2, bool i3) const {
    if (whole) return std::min(c, kSatCount);
    uint64_t ls = (pow2 >= kSatCount) ? kSatCount : pow2 - low_l;
    uint64_t rs = std::min(low_r + 1, kSatCount);
    uint64_t n = (i2 ? ls : 0) + (i3 ? rs : 0);
    return std::min(n, kSatCount);
  }
};

void record_regions(QueryBins& b, uint64_t nr, unsigned k) {
  if (nr == 0) {  // cannot happen for a genuinely empty query
    assert(false);
    b.trie_resolved++;
    return;
  }
  unsigned i = bin_index(nr, k);
  b.bins[i].first++;
  b.bins[i].second += nr;
}

}  // namespace

QueryBins bin_queries(const SampleStats& stats, unsigned l1, unsigned l2) {
  unsigned k = stats.width();
  if (l2 < 1 || l2 > k || (l1 > 0 && l1 >= l2))
    throw std::invalid_argument("bin_queries: bad design");
  QueryBins b;
  b.bins.assign(k + 1, {0, 0});
  for (size_t i = 0; i < stats.size(); i++) {
    const NeighborLcps& nb = stats.lcps(i);
    if (l1 > 0 && nb.min_len < l1) {
      b.trie_resolved++;
      continue;
    }
    if (l2 <= nb.min_len) {
      b.guaranteed++;
      continue;
    }
    QueryView q = stats.query(i);
    uint64_t nr = l1 == 0 ? sat_cover_count(q.left, q.right, l2)
                          : probe_regions(endpoint_analysis(q, nb, l1, l2));
    record_regions(b, nr, k);
  }
  return b;
}

double design_fpr_binned(const QueryBins& b, double p, uint64_t sample_size) {
  long double acc = 0.0L;
  for (size_t i = 1; i < b.bins.size(); i++) {
    auto [cnt, sum] = b.bins[i];
    if (cnt == 0) continue;
    long double mean = (long double)sum / (long double)cnt;
    long double neg;
    if (p <= 0.0)
      neg = 1.0L;
    else if (p >= 1.0)
      neg = 0.0L;
    else
      neg = expl(mean * log1pl(-(long double)p));
    acc += (long double)cnt * (1.0L - neg);
  }
  acc += (long double)b.guaranteed;
  return static_cast<double>(acc / (long double)sample_size);
}

double design_fpr_exact(const SampleStats& stats, unsigned l1, unsigned l2,
                        double p) {
  long double acc = 0.0L;
  for (size_t i = 0; i < stats.size(); i++)
    acc += (long double)fpr_proteus(stats, i, l1, l2, p);
  return static_cast<double>(acc / (long double)stats.size());
}

std::vector<unsigned> bloom_length_grid(unsigned k, unsigned max_lengths) {
  std::vector<unsigned> out;
  if (max_lengths == 0 || max_lengths >= k) {
    out.resize(k);
    std::iota(out.begin(), out.end(), 1u);
    return out;
  }
  if (max_lengths == 1) return {k};
  for (unsigned i = 0; i < max_lengths; i++) {
    double pos = 1.0 + (double)i * (k - 1) / (double)(max_lengths - 1);
    unsigned l = static_cast<unsigned>(std::lround(pos));
    if (out.empty() || out.back() != l) out.push_back(l);
  }
  return out;
}

namespace {

struct Candidate {
  DesignPoint d;
  double fpr;
};

// Keeps the running best under the tie rule: later-enumerated designs win
// ties unless strict improvement is requested.
struct Best {
  bool strict;
  bool any = false;
  Candidate c{{}, 1.0};
  void offer(const DesignPoint& d, double fpr) {
    bool better = !any || (strict ? fpr < c.fpr : fpr <= c.fpr);
    if (better) {
      c = {d, fpr};
      any = true;
    }
  }
};

// Bins for every candidate l2 > max(l1, min_len) in one pass per l1.
void accumulate_bins_for_l1(const SampleStats& stats, unsigned l1, unsigned k,
                            const std::vector<unsigned>& l2s, size_t first_idx,
                            uint64_t resolved, std::vector<QueryBins>& bins) {
  for (size_t i = first_idx; i < l2s.size(); i++) {
    bins[i].trie_resolved = resolved;
    bins[i].guaranteed = 0;
    bins[i].bins.assign(k + 1, {0, 0});
  }
  for (size_t qi = 0; qi < stats.size(); qi++) {
    const NeighborLcps& nb = stats.lcps(qi);
    if (l1 > 0 && nb.min_len < l1) continue;  // already counted as resolved
    QueryView q = stats.query(qi);

    size_t idx = first_idx;
    while (idx < l2s.size() && l2s[idx] <= nb.min_len) {
      bins[idx].guaranteed++;
      idx++;
    }
    if (idx == l2s.size()) continue;

    bool single = l1 >= 1 && l1 <= nb.qlcp;
    CoverWalk cw;
    cw.init(q, l1, single, l2s[idx]);
    bool i2 = true, i3 = false;
    if (l1 >= 1 && !single) {
      i2 = nb.lcp_left >= l1;
      i3 = nb.lcp_right >= l1;
    }
    for (;;) {
      record_regions(bins[idx], cw.regions(i2, i3), k);
      idx++;
      if (idx == l2s.size()) break;
      while (cw.l2 < l2s[idx]) cw.step(q);
    }
  }
}

ModelVerdict select_proteus_like(const KeyPrefixCounts& counts,
                                 const SampleStats& stats, uint64_t budget,
                                 bool with_trie, const SelectOptions& opt) {
  unsigned k = counts.width();
  uint64_t S = stats.size();
  std::vector<unsigned> l2s = bloom_length_grid(k, opt.max_bloom_lengths);

  // resolved_cum[l1] = queries with lcp(Q,K) < l1 (trie depth l1 resolves them)
  std::vector<uint64_t> resolved_cum(k + 2, 0);
  {
    std::vector<uint64_t> hist(k + 1, 0);
    for (size_t i = 0; i < stats.size(); i++) hist[stats.lcps(i).min_len]++;
    for (unsigned l = 1; l <= k + 1; l++)
      resolved_cum[l] = resolved_cum[l - 1] + hist[l - 1];
  }

  unsigned max_l1 = 0;
  std::vector<uint64_t> tm(k + 1, 0);
  if (with_trie) {
    for (unsigned l1 = 1; l1 <= k; l1++) {
      tm[l1] = trie_mem(l1, counts);
      if (tm[l1] > budget) break;
      max_l1 = l1;
    }
  }

  ModelVerdict v;
  Best best{opt.strict_ties};
  std::vector<QueryBins> bins(l2s.size());

  for (unsigned l1 = 0; l1 <= max_l1; l1++) {
    if (l1 >= 1) {  // trie-only design
      double fpr = 1.0 - (double)resolved_cum[l1] / (double)S;
      DesignPoint d{l1, 0, 0.5, budget};
      v.per_design.emplace_back(d, fpr);
      best.offer(d, fpr);
    }
    size_t first_idx = 0;
    while (first_idx < l2s.size() && l2s[first_idx] <= l1) first_idx++;
    if (first_idx == l2s.size()) continue;

    accumulate_bins_for_l1(stats, l1, k, l2s, first_idx, resolved_cum[l1], bins);

    uint64_t m_bf = budget - tm[l1];
    for (size_t idx = first_idx; idx < l2s.size(); idx++) {
      unsigned l2 = l2s[idx];
      double p = bloom_plan(m_bf, counts.counts[l2]).fpr;
      double fpr = design_fpr_binned(bins[idx], p, S);
      DesignPoint d{l1, l2, 0.5, budget};
      v.per_design.emplace_back(d, fpr);
      best.offer(d, fpr);
    }
  }
  if (!best.any) throw InfeasibleDesignError("no feasible design");
  v.chosen = best.c.d;
  v.expected_fpr = best.c.fpr;
  return v;
}

// Double-precision evaluation of the two-filter formula for the selection
// loop; the cases match fpr_2pbf exactly, with log(1-p2) hoisted by the
// caller. Guaranteed queries never reach it.
double fpr_2pbf_fast(const TwoPbfShape& s, double p1, double log1m_p2) {
  double neg_l = 0.0, neg_r = 0.0;
  if (s.i0) {
    double fine = s.l_count > 0 ? std::exp((double)s.l_count * log1m_p2) : 1.0;
    neg_l = (s.i2_exp ? p1 : 1.0) * fine;
  }
  if (s.i1) {
    double fine = s.r_count > 0 ? std::exp((double)s.r_count * log1m_p2) : 1.0;
    neg_r = (s.i3_exp ? p1 : 1.0) * fine;
  }
  double sum;
  if (s.n_mid < 0) {
    sum = 0.0;
  } else if (s.n_mid == 0) {
    sum = 1.0;
  } else {
    double q2 = std::exp((double)s.width2 * log1m_p2);
    double base = 1.0 - p1 + p1 * q2;
    sum = base <= 0.0 ? 0.0 : std::exp((double)s.n_mid * std::log(base));
  }
  double fp = 1.0 - neg_l - neg_r - sum;
  if (fp < 0.0) return 0.0;
  if (fp > 1.0) return 1.0;
  return fp;
}

ModelVerdict select_2pbf(const KeyPrefixCounts& counts, const SampleStats& stats,
                         uint64_t budget, const SelectOptions& opt) {
  unsigned k = counts.width();
  uint64_t S = stats.size();
  if (k < 2) throw InfeasibleDesignError("two-filter design needs width >= 2");
  static constexpr double kSplits[3] = {0.4, 0.5, 0.6};
  std::vector<unsigned> l2s = bloom_length_grid(k, opt.max_bloom_lengths);

  // Per-split memory halves and per-length probe FPRs.
  std::vector<double> p_coarse[3], p_fine[3], log1m_fine[3];
  for (int s = 0; s < 3; s++) {
    uint64_t m1 = static_cast<uint64_t>(
        std::ceil(kSplits[s] * static_cast<double>(budget)));
    m1 = std::min(m1, budget);
    p_coarse[s].assign(k + 1, 1.0);
    p_fine[s].assign(k + 1, 1.0);
    log1m_fine[s].assign(k + 1, 0.0);
    for (unsigned l = 1; l <= k; l++) {
      p_coarse[s][l] = bloom_plan(m1, counts.counts[l]).fpr;
      p_fine[s][l] = bloom_plan(budget - m1, counts.counts[l]).fpr;
      log1m_fine[s][l] = std::log1p(-p_fine[s][l]);
    }
  }

  // sums[(l1-1) * |l2s| * 3 + idx * 3 + s]
  std::vector<long double> sums((size_t)(k - 1) * l2s.size() * 3, 0.0L);
  auto at = [&](unsigned l1, size_t idx, int s) -> long double& {
    return sums[((size_t)(l1 - 1) * l2s.size() + idx) * 3 + s];
  };

  for (size_t qi = 0; qi < stats.size(); qi++) {
    const NeighborLcps& nb = stats.lcps(qi);
    QueryView q = stats.query(qi);
    for (unsigned l1 = 1; l1 < k; l1++) {
      size_t idx = 0;
      while (idx < l2s.size() && l2s[idx] <= l1) idx++;
      while (idx < l2s.size() && l2s[idx] <= nb.min_len) {
        for (int s = 0; s < 3; s++) at(l1, idx, s) += 1.0L;
        idx++;
      }
      if (idx == l2s.size()) continue;

      // Per-(query, l1) geometry is fixed; only the fine-grained counts move
      // with l2, so step them incrementally instead of re-deriving the shape.
      TwoPbfShape sh;
      bool single = l1 <= nb.qlcp;
      uint64_t ql1 = 1;
      bool contained = false;
      if (single) {
        contained = kv_low_zero(q.left, l1) && kv_low_ones(q.right, l1);
        sh.i0 = sh.i1 = !contained;
        sh.i2_exp = 1;
        sh.i3_exp = nb.min_len >= l1 ? 0 : 1;
        sh.n_mid = 1 - (sh.i0 ? 1 : 0) - (sh.i1 ? 1 : 0);
      } else {
        sh.i0 = !kv_low_zero(q.left, l1);
        sh.i1 = !kv_low_ones(q.right, l1);
        sh.i2_exp = nb.lcp_left >= l1 ? 0 : 1;
        sh.i3_exp = nb.lcp_right >= l1 ? 0 : 1;
        ql1 = sat_cover_count(q.left, q.right, l1);
        sh.n_mid = static_cast<int64_t>(std::min(ql1, kSatCount)) -
                   (sh.i0 ? 1 : 0) - (sh.i1 ? 1 : 0);
      }
      CoverWalk cw;
      cw.init(q, single ? 0 : l1, single, l2s[idx]);
      uint64_t pow2 = (l2s[idx] - l1 >= 62) ? kSatCount
                                            : (uint64_t(1) << (l2s[idx] - l1));
      for (;;) {
        sh.width2 = pow2;
        if (single) {
          sh.l_count = sh.r_count = cw.regions(true, false);
        } else {
          sh.l_count = (pow2 >= kSatCount) ? kSatCount : pow2 - cw.low_l;
          sh.r_count = std::min(cw.low_r + 1, kSatCount);
        }
        for (int s = 0; s < 3; s++)
          at(l1, idx, s) += (long double)fpr_2pbf_fast(
              sh, p_coarse[s][l1], log1m_fine[s][l2s[idx]]);
        idx++;
        if (idx == l2s.size()) break;
        while (cw.l2 < l2s[idx]) {
          cw.step(q);
          pow2 = (pow2 >= kSatCount / 2) ? kSatCount : 2 * pow2;
        }
      }
    }
  }

  ModelVerdict v;
  Best best{opt.strict_ties};
  for (unsigned l1 = 1; l1 < k; l1++) {
    for (size_t idx = 0; idx < l2s.size(); idx++) {
      if (l2s[idx] <= l1) continue;
      for (int s = 0; s < 3; s++) {
        double fpr = static_cast<double>(at(l1, idx, s) / (long double)S);
        DesignPoint d{l1, l2s[idx], kSplits[s], budget};
        v.per_design.emplace_back(d, fpr);
        best.offer(d, fpr);
      }
    }
  }
  if (!best.any) throw InfeasibleDesignError("no feasible design");
  v.chosen = best.c.d;
  v.expected_fpr = best.c.fpr;
  return v;
}

}  // namespace

ModelVerdict select_design(const KeyPrefixCounts& counts,
                           const SampleStats& stats, uint64_t budget_bits,
                           FilterFamily family, const SelectOptions& opt) {
  if (stats.size() == 0)
    throw std::invalid_argument("select_design: empty sample");
  if (budget_bits == 0)
    throw std::invalid_argument("select_design: zero budget");
  switch (family) {
    case FilterFamily::kProteus:
      return select_proteus_like(counts, stats, budget_bits, true, opt);
    case FilterFamily::kOnePbf:
      return select_proteus_like(counts, stats, budget_bits, false, opt);
    case FilterFamily::kTwoPbf:
      return select_2pbf(counts, stats, budget_bits, opt);
  }
  throw std::invalid_argument("select_design: unknown family");
}

ModelVerdict select_design(const KeySet& keys, const QuerySet& sample,
                           uint64_t budget_bits, FilterFamily family,
                           const SelectOptions& opt) {
  KeyPrefixCounts counts = count_key_prefixes(keys);
  SampleStats stats = SampleStats::extract(keys, sample);
  return select_design(counts, stats, budget_bits, family, opt);
}

double chernoff_bound(double n_samples, double delta, double p_max) {
  double nd2 = n_samples * delta * delta;
  double a = 2.0 * std::exp(-2.0 * nd2);
  double b = std::exp(-nd2 / (2.0 * p_max)) + std::exp(-nd2 / (3.0 * p_max));
  return std::min(1.0, std::min(a, b));
}

}  // namespace prf
