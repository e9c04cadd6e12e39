#include "prf/filters.hpp"

#include <cmath>

#include "prf/keyspace.hpp"

namespace prf {

const char* family_name(FilterFamily f) {
  switch (f) {
    case FilterFamily::kProteus: return "proteus";
    case FilterFamily::kOnePbf: return "pbf1";
    case FilterFamily::kTwoPbf: return "pbf2";
  }
  return "?";
}

FilterFamily family_from_name(const std::string& name) {
  if (name == "proteus") return FilterFamily::kProteus;
  if (name == "pbf1") return FilterFamily::kOnePbf;
  if (name == "pbf2") return FilterFamily::kTwoPbf;
  throw std::invalid_argument("unknown filter family: " + name);
}

namespace {

void check_build_inputs(const KeySet& keys, const DesignPoint& d) {
  if (keys.empty()) throw std::invalid_argument("filter build: empty key set");
  if (d.budget_bits == 0) throw std::invalid_argument("filter build: zero budget");
  assert(keys.is_sorted());
}

// Copies the l1-wide prefix x into a width-l2 buffer and fills the tail bits.
void extend_prefix(KeyView x, unsigned l2, bool ones, Word* out) {
  unsigned nw = words_for_bits(l2);
  unsigned nx = x.nwords();
  for (unsigned i = 0; i < nw; i++) out[i] = i < nx ? x.w[i] : 0;
  kv_fill_range(out, x.width, l2, ones);
}

// Probes every l-bit value in [y (in-place lower bound), yhi] in ascending
// order. Returns true iff some probe was positive; fills trace/probe count.
template <typename Probe>
bool scan_prefixes(Word* y, KeyView yhi, unsigned l, uint64_t& probes,
                   const QueryOptions& opt, Probe&& probe) {
  bool positive = false;
  for (;;) {
    KeyView yv{y, l};
    probes++;
    if (opt.trace)
      opt.trace->emplace_back(l, std::span<const Word>(y, words_for_bits(l)));
    if (probe(yv)) {
      positive = true;
      if (opt.short_circuit) return true;
    }
    if (!kv_less(yv, yhi)) break;
    kv_increment(y, l);
  }
  return positive;
}

}  // namespace

// ---------------------------------------------------------------------------
// Proteus

ProteusFilter ProteusFilter::build(const KeySet& keys, const DesignPoint& d,
                                   uint64_t seed) {
  check_build_inputs(keys, d);
  unsigned k = keys.width();
  if (d.l1 > k || d.l2 > k)
    throw std::invalid_argument("proteus build: prefix length exceeds key width");
  if (d.l1 == 0 && d.l2 == 0)
    throw std::invalid_argument("proteus build: empty design");
  if (d.l1 > 0 && d.l2 > 0 && d.l1 >= d.l2)
    throw std::invalid_argument("proteus build: need l1 < l2");

  ProteusFilter f;
  f.design_ = d;
  f.key_width_ = k;

  uint64_t trie_bits = 0;
  if (d.l1 > 0) {
    auto counts = prefix_count_table(keys);
    TriePlan plan = plan_trie(d.l1, counts);
    if (plan.bits > d.budget_bits)
      throw InfeasibleDesignError("trie estimate exceeds memory budget");
    f.trie_ = UniformTrie::build_from_keys(keys, d.l1, plan.dense_cutoff);
    trie_bits = f.trie_->size_bits();
    if (trie_bits > d.budget_bits)
      throw InfeasibleDesignError("built trie exceeds memory budget");
  }
  if (d.l2 > 0) {
    // Whatever the trie did not use goes to the Bloom filter, including the
    // slack from the conservative trie estimate.
    uint64_t m = d.budget_bits - trie_bits;
    uint64_t n = count_unique_prefixes(keys, d.l2);
    f.bloom_.emplace(m, n, d.l2, seed);
    for (size_t i = 0; i < keys.size(); i++) {
      if (i > 0 && kv_lcp(keys[i - 1], keys[i]) >= d.l2) continue;
      f.bloom_->insert_prefix_of(keys[i]);
    }
    f.bloom_->freeze();
  }
  return f;
}

QueryOutcome ProteusFilter::query(QueryView q, const QueryOptions& opt) const {
  assert(q.left.width == key_width_ && q.right.width == key_width_);
  QueryOutcome out;
  unsigned l1 = design_.l1, l2 = design_.l2;

  if (!trie_) {  // pure prefix Bloom filter
    KeyScratch ylo, yhi;
    kv_copy_prefix(q.left, l2, ylo.data());
    kv_copy_prefix(q.right, l2, yhi.data());
    out.positive =
        scan_prefixes(ylo.data(), yhi.view(l2), l2, out.bloom_probes, opt,
                      [&](KeyView y) { return bloom_->query_prefix_of(y); });
    return out;
  }

  KeyScratch f1, g1;
  kv_copy_prefix(q.left, l1, f1.data());
  kv_copy_prefix(q.right, l1, g1.data());
  KeyView first1 = f1.view(l1), last1 = g1.view(l1);

  if (!bloom_) {  // pure trie: exact at l1 granularity
    out.positive = trie_->for_each_in_range(first1, last1, [&](KeyView) {
      out.trie_probes++;
      return opt.short_circuit;
    });
    if (!opt.short_circuit) out.positive = out.trie_probes > 0;
    return out;
  }

  bool positive = false;
  KeyScratch ylo, yhi;
  trie_->for_each_in_range(first1, last1, [&](KeyView x) {
    out.trie_probes++;
    // Bloom range under this trie hit: the slice of Q_l2 below x.
    if (kv_eq(x, first1))
      kv_copy_prefix(q.left, l2, ylo.data());
    else
      extend_prefix(x, l2, false, ylo.data());
    if (kv_eq(x, last1))
      kv_copy_prefix(q.right, l2, yhi.data());
    else
      extend_prefix(x, l2, true, yhi.data());
    bool pos =
        scan_prefixes(ylo.data(), yhi.view(l2), l2, out.bloom_probes, opt,
                      [&](KeyView y) { return bloom_->query_prefix_of(y); });
    if (pos) {
      positive = true;
      return opt.short_circuit;
    }
    return false;
  });
  out.positive = positive;
  return out;
}

uint64_t ProteusFilter::size_bits() const {
  uint64_t total = 0;
  if (trie_) total += trie_->size_bits();
  if (bloom_) total += bloom_->size_bits();
  return total;
}

// ---------------------------------------------------------------------------
// 1PBF

OnePbfFilter OnePbfFilter::build(const KeySet& keys, const DesignPoint& d,
                                 uint64_t seed) {
  check_build_inputs(keys, d);
  unsigned l = d.l2;
  if (l < 1 || l > keys.width())
    throw std::invalid_argument("pbf1 build: prefix length out of range");
  OnePbfFilter f;
  f.design_ = d;
  f.key_width_ = keys.width();
  uint64_t n = count_unique_prefixes(keys, l);
  f.bloom_.emplace(d.budget_bits, n, l, seed);
  for (size_t i = 0; i < keys.size(); i++) {
    if (i > 0 && kv_lcp(keys[i - 1], keys[i]) >= l) continue;
    f.bloom_->insert_prefix_of(keys[i]);
  }
  f.bloom_->freeze();
  return f;
}

QueryOutcome OnePbfFilter::query(QueryView q, const QueryOptions& opt) const {
  assert(q.left.width == key_width_);
  QueryOutcome out;
  unsigned l = design_.l2;
  KeyScratch ylo, yhi;
  kv_copy_prefix(q.left, l, ylo.data());
  kv_copy_prefix(q.right, l, yhi.data());
  out.positive =
      scan_prefixes(ylo.data(), yhi.view(l), l, out.bloom_probes, opt,
                    [&](KeyView y) { return bloom_->query_prefix_of(y); });
  return out;
}

// ---------------------------------------------------------------------------
// 2PBF

TwoPbfFilter TwoPbfFilter::build(const KeySet& keys, const DesignPoint& d,
                                 uint64_t seed) {
  check_build_inputs(keys, d);
  unsigned k = keys.width();
  if (!(1 <= d.l1 && d.l1 < d.l2 && d.l2 <= k))
    throw std::invalid_argument("pbf2 build: need 1 <= l1 < l2 <= width");
  TwoPbfFilter f;
  f.design_ = d;
  f.key_width_ = k;
  uint64_t m1 = static_cast<uint64_t>(
      std::ceil(d.memory_split * static_cast<double>(d.budget_bits)));
  m1 = std::min(m1, d.budget_bits);
  uint64_t m2 = d.budget_bits - m1;
  f.bf1_.emplace(m1, count_unique_prefixes(keys, d.l1), d.l1, seed);
  f.bf2_.emplace(m2, count_unique_prefixes(keys, d.l2), d.l2, seed ^ 0x5bd1e995);
  for (size_t i = 0; i < keys.size(); i++) {
    unsigned lcp = i > 0 ? kv_lcp(keys[i - 1], keys[i]) : 0;
    if (i == 0 || lcp < d.l1) f.bf1_->insert_prefix_of(keys[i]);
    if (i == 0 || lcp < d.l2) f.bf2_->insert_prefix_of(keys[i]);
  }
  f.bf1_->freeze();
  f.bf2_->freeze();
  return f;
}

QueryOutcome TwoPbfFilter::query(QueryView q, const QueryOptions& opt) const {
  assert(q.left.width == key_width_);
  QueryOutcome out;
  unsigned l1 = design_.l1, l2 = design_.l2;
  KeyScratch x, f1, g1, ylo, yhi;
  kv_copy_prefix(q.left, l1, f1.data());
  kv_copy_prefix(q.right, l1, g1.data());
  KeyView first1 = f1.view(l1), last1 = g1.view(l1);
  kv_copy_prefix(q.left, l1, x.data());
  bool positive = false;
  for (;;) {
    KeyView xv = x.view(l1);
    out.trie_probes++;  // coarse-filter probes
    if (bf1_->query_prefix_of(xv)) {
      if (kv_eq(xv, first1))
        kv_copy_prefix(q.left, l2, ylo.data());
      else
        extend_prefix(xv, l2, false, ylo.data());
      if (kv_eq(xv, last1))
        kv_copy_prefix(q.right, l2, yhi.data());
      else
        extend_prefix(xv, l2, true, yhi.data());
      bool pos =
          scan_prefixes(ylo.data(), yhi.view(l2), l2, out.bloom_probes, opt,
                        [&](KeyView y) { return bf2_->query_prefix_of(y); });
      if (pos) {
        positive = true;
        if (opt.short_circuit) break;
      }
    }
    if (!kv_less(xv, last1)) break;
    kv_increment(x.data(), l1);
  }
  out.positive = positive;
  return out;
}

// ---------------------------------------------------------------------------
// AnyFilter

AnyFilter AnyFilter::build(FilterFamily family, const KeySet& keys,
                           const DesignPoint& design, uint64_t seed) {
  AnyFilter f;
  f.family_ = family;
  switch (family) {
    case FilterFamily::kProteus:
      f.proteus_ =
          std::make_shared<ProteusFilter>(ProteusFilter::build(keys, design, seed));
      break;
    case FilterFamily::kOnePbf:
      f.pbf1_ =
          std::make_shared<OnePbfFilter>(OnePbfFilter::build(keys, design, seed));
      break;
    case FilterFamily::kTwoPbf:
      f.pbf2_ =
          std::make_shared<TwoPbfFilter>(TwoPbfFilter::build(keys, design, seed));
      break;
  }
  return f;
}

QueryOutcome AnyFilter::query(QueryView q, const QueryOptions& opt) const {
  switch (family_) {
    case FilterFamily::kProteus: return proteus_->query(q, opt);
    case FilterFamily::kOnePbf: return pbf1_->query(q, opt);
    case FilterFamily::kTwoPbf: return pbf2_->query(q, opt);
  }
  return {};
}

uint64_t AnyFilter::size_bits() const {
  switch (family_) {
    case FilterFamily::kProteus: return proteus_->size_bits();
    case FilterFamily::kOnePbf: return pbf1_->size_bits();
    case FilterFamily::kTwoPbf: return pbf2_->size_bits();
  }
  return 0;
}

const DesignPoint& AnyFilter::design() const {
  switch (family_) {
    case FilterFamily::kProteus: return proteus_->design();
    case FilterFamily::kOnePbf: return pbf1_->design();
    case FilterFamily::kTwoPbf: return pbf2_->design();
  }
  return proteus_->design();
}

}  // namespace prf
