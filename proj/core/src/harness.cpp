#include "prf/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace prf {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "workload,family,bpk,l1,l2,split,predicted_fpr,observed_fpr,"
         "mean_trie_probes,mean_bloom_probes,model_ms,build_ms,n_eval_queries";
}

std::string to_csv(const RunRow& r) {
  std::ostringstream os;
  os << r.workload << "," << r.family << "," << fmt(r.bpk) << "," << r.l1 << ","
     << r.l2 << "," << fmt(r.split) << "," << fmt(r.predicted_fpr) << ","
     << fmt(r.observed_fpr) << "," << fmt(r.mean_trie_probes) << ","
     << fmt(r.mean_bloom_probes) << "," << fmt(r.model_ms) << ","
     << fmt(r.build_ms) << "," << r.n_eval_queries;
  return os.str();
}

void write_csv(const std::vector<RunRow>& rows, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << csv_header() << "\n";
    for (const auto& r : rows) std::cout << to_csv(r) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write csv: " + path);
  out << csv_header() << "\n";
  for (const auto& r : rows) out << to_csv(r) << "\n";
}

WorkloadData prepare_workload(const WorkloadSpec& spec, double bpk) {
  WorkloadData d;
  const KeySet* pool = nullptr;
  KeySet full_pool;
  if (spec.key_dist == KeyDist::kFile && spec.query_kind == QueryKind::kReal) {
    full_pool = load_sosd(spec.keys_path);  // left bounds come from the file
    pool = &full_pool;
  }
  d.keys = gen_keys(spec);
  if (!spec.queries_path.empty()) {
    QuerySet loaded = load_queries_text(spec.queries_path, spec.key_width_bits());
    d.queries.eval = loaded;
    d.queries.empty.clear();
    for (size_t i = 0; i < loaded.size(); i++)
      d.queries.empty.push_back(
          range_empty(d.keys, loaded[i].left, loaded[i].right) ? 1 : 0);
    // sample = empty members of a disjoint generated stream
    WorkloadSpec s2 = spec;
    s2.queries_path.clear();
    d.queries.sample = gen_queries(s2, d.keys, pool).sample;
  } else {
    d.queries = gen_queries(spec, d.keys, pool);
  }
  d.budget_bits = static_cast<uint64_t>(
      std::llround(bpk * static_cast<double>(d.keys.size())));
  return d;
}

RunRow eval_design(const WorkloadData& data, const HarnessConfig& cfg,
                   const DesignPoint& design, double predicted_fpr,
                   double model_ms) {
  RunRow row;
  row.workload = cfg.workload.id();
  row.family = family_name(cfg.family);
  row.bpk = cfg.bpk;
  row.l1 = design.l1;
  row.l2 = design.l2;
  row.split = cfg.family == FilterFamily::kTwoPbf ? design.memory_split : 0.0;
  row.predicted_fpr = predicted_fpr;
  row.model_ms = model_ms;

  auto t0 = std::chrono::steady_clock::now();
  AnyFilter filter = AnyFilter::build(cfg.family, data.keys, design,
                                      cfg.workload.seed ^ 0xb10f);
  row.build_ms = ms_since(t0);

  uint64_t n_empty = 0, false_pos = 0, trie_probes = 0, bloom_probes = 0;
  for (size_t i = 0; i < data.queries.eval.size(); i++) {
    QueryOutcome out = filter.query(data.queries.eval[i]);
    if (!data.queries.empty[i]) {
      if (!out.positive)
        throw std::logic_error("false negative on a non-empty query");
      continue;
    }
    n_empty++;
    if (out.positive) false_pos++;
    trie_probes += out.trie_probes;
    bloom_probes += out.bloom_probes;
  }
  row.n_eval_queries = n_empty;
  if (n_empty > 0) {
    row.observed_fpr = static_cast<double>(false_pos) / n_empty;
    row.mean_trie_probes = static_cast<double>(trie_probes) / n_empty;
    row.mean_bloom_probes = static_cast<double>(bloom_probes) / n_empty;
  }
  return row;
}

std::vector<RunRow> run_eval(const HarnessConfig& cfg) {
  WorkloadData data = prepare_workload(cfg.workload, cfg.bpk);
  auto t0 = std::chrono::steady_clock::now();
  KeyPrefixCounts counts = count_key_prefixes(data.keys);
  SampleStats stats = SampleStats::extract(data.keys, data.queries.sample);
  ModelVerdict verdict;
  try {
    verdict =
        select_design(counts, stats, data.budget_bits, cfg.family, cfg.select);
  } catch (const InfeasibleDesignError&) {
    RunRow row;  // -1 markers: nothing fit the budget
    row.workload = cfg.workload.id();
    row.family = family_name(cfg.family);
    row.bpk = cfg.bpk;
    row.model_ms = ms_since(t0);
    return {row};
  }
  double model_ms = ms_since(t0);
  DesignPoint chosen = verdict.chosen;
  chosen.budget_bits = data.budget_bits;
  return {eval_design(data, cfg, chosen, verdict.expected_fpr, model_ms)};
}

std::vector<RunRow> run_sweep(const HarnessConfig& cfg) {
  WorkloadData data = prepare_workload(cfg.workload, cfg.bpk);
  auto t0 = std::chrono::steady_clock::now();
  KeyPrefixCounts counts = count_key_prefixes(data.keys);
  SampleStats stats = SampleStats::extract(data.keys, data.queries.sample);
  ModelVerdict verdict =
      select_design(counts, stats, data.budget_bits, cfg.family, cfg.select);
  double model_ms = ms_since(t0);

  std::vector<RunRow> rows;
  unsigned k = counts.width();
  for (const auto& [design, predicted] : verdict.per_design) {
    if (design.l1 % std::max(1u, cfg.l1_step) != 0 && design.l1 != 0) continue;
    if (design.l2 % std::max(1u, cfg.l2_step) != 0 && design.l2 != 0) continue;
    DesignPoint d = design;
    d.budget_bits = data.budget_bits;
    rows.push_back(eval_design(data, cfg, d, predicted, model_ms));
  }
  if (cfg.family == FilterFamily::kProteus) {
    // grey out trie depths the budget cannot hold
    for (unsigned l1 = 1; l1 <= k; l1++) {
      if (trie_mem(l1, counts) <= data.budget_bits) continue;
      RunRow row;
      row.workload = cfg.workload.id();
      row.family = family_name(cfg.family);
      row.bpk = cfg.bpk;
      row.l1 = l1;
      row.l2 = 0;
      row.predicted_fpr = -1;
      row.observed_fpr = -1;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Shifting workload simulation

SegmentedStore::SegmentedStore(const KeySet& keys, unsigned segments,
                               double bpk, FilterFamily family,
                               const SelectOptions& select, uint64_t seed)
    : bpk_(bpk), family_(family), select_(select), seed_(seed),
      width_(keys.width()) {
  if (keys.empty()) throw std::invalid_argument("segmented store: no keys");
  segments = std::max(1u, segments);
  size_t per = (keys.size() + segments - 1) / segments;
  for (size_t b = 0; b < keys.size(); b += per) {
    size_t e = std::min(keys.size(), b + per);
    Segment s;
    s.keys = KeySet(width_);
    s.keys.reserve(e - b);
    for (size_t i = b; i < e; i++) s.keys.push_back(keys[i]);
    s.lo = s.keys.key(0);
    s.hi = s.keys.key(s.keys.size() - 1);
    segs_.push_back(std::move(s));
  }
}

void SegmentedStore::seed_queue(const QuerySet& sample, uint64_t capacity) {
  queue_capacity_ = capacity;
  for (size_t i = 0; i < sample.size(); i++) {
    QueryView q = sample[i];
    queue_.emplace_back(
        Key(width_, std::span<const Word>(q.left.w, q.left.nwords())),
        Key(width_, std::span<const Word>(q.right.w, q.right.nwords())));
    if (queue_.size() > queue_capacity_) queue_.pop_front();
  }
  for (size_t i = 0; i < segs_.size(); i++) rebuild_segment(i);
}

void SegmentedStore::observe_empty_query(QueryView q, uint64_t sample_every) {
  empty_seen_++;
  if (sample_every == 0 || empty_seen_ % sample_every != 0) return;
  queue_.emplace_back(
      Key(width_, std::span<const Word>(q.left.w, q.left.nwords())),
      Key(width_, std::span<const Word>(q.right.w, q.right.nwords())));
  if (queue_.size() > queue_capacity_) queue_.pop_front();
}

void SegmentedStore::rebuild_next() {
  rebuild_segment(next_rebuild_);
  next_rebuild_ = (next_rebuild_ + 1) % segs_.size();
}

void SegmentedStore::rebuild_segment(size_t idx) {
  Segment& s = segs_[idx];
  QuerySet sample(width_);
  sample.reserve(queue_.size());
  for (const auto& [l, r] : queue_) sample.push(l, r);
  uint64_t budget = static_cast<uint64_t>(
      std::llround(bpk_ * static_cast<double>(s.keys.size())));
  ModelVerdict v = select_design(s.keys, sample, budget, family_, select_);
  DesignPoint d = v.chosen;
  d.budget_bits = budget;
  s.design = d;
  s.filter = AnyFilter::build(family_, s.keys, d, seed_ ^ (idx * 0x9e37));
}

bool SegmentedStore::probe(QueryView q) const {
  KeyScratch lo, hi;
  for (const Segment& s : segs_) {
    if (kv_less(q.right, s.lo) || kv_less(KeyView(s.hi), q.left)) continue;
    // clamp to the segment's key range, as an SST index would
    KeyView cl = kv_less(q.left, s.lo) ? KeyView(s.lo) : q.left;
    KeyView ch = kv_less(KeyView(s.hi), q.right) ? KeyView(s.hi) : q.right;
    kv_copy_prefix(cl, width_, lo.data());
    kv_copy_prefix(ch, width_, hi.data());
    if (s.filter.query({lo.view(width_), hi.view(width_)}).positive)
      return true;
  }
  return false;
}

bool SegmentedStore::truly_empty(QueryView q) const {
  for (const Segment& s : segs_) {
    if (kv_less(q.right, s.lo) || kv_less(KeyView(s.hi), q.left)) continue;
    if (!range_empty(s.keys, q.left, q.right)) return false;
  }
  return true;
}

const DesignPoint& SegmentedStore::segment_design(size_t i) const {
  return segs_[i].design;
}

std::vector<RunRow> run_shift(const ShiftConfig& cfg) {
  KeySet keys = gen_keys(cfg.keys_spec);
  SegmentedStore store(keys, cfg.segments, cfg.bpk, cfg.family, cfg.select,
                       cfg.keys_spec.seed);

  // Seed the queue from the start distribution, then build all filters.
  {
    QueryStream seeder(cfg.start, keys, cfg.start.seed ^ 0x51454445ULL);
    QuerySet init(keys.width());
    uint64_t n = std::min<uint64_t>(cfg.queue_capacity, cfg.start.n_sample);
    init.reserve(n);
    for (uint64_t i = 0; i < n; i++) init.push(seeder.next_empty());
    store.seed_queue(init, cfg.queue_capacity);
  }

  QueryStream start_stream(cfg.start, keys, cfg.start.seed ^ 0x777);
  QueryStream end_stream(cfg.end, keys, cfg.end.seed ^ 0x888);
  Rng mix(cfg.keys_spec.seed ^ 0x4d4958ULL);

  std::vector<RunRow> rows;
  uint64_t total = cfg.batches * cfg.batch_queries;
  uint64_t executed = 0;
  for (unsigned batch = 0; batch < cfg.batches; batch++) {
    uint64_t n_empty = 0, false_pos = 0;
    for (uint64_t j = 0; j < cfg.batch_queries; j++, executed++) {
      double ratio;
      if (cfg.mode == ShiftMode::kGradual)
        ratio = total <= 1 ? 1.0
                           : static_cast<double>(executed) /
                                 static_cast<double>(total - 1);
      else
        ratio = executed * 2 >= total ? 1.0 : 0.0;
      RangeQuery q =
          mix.bernoulli(ratio) ? end_stream.next() : start_stream.next();
      bool empty = store.truly_empty(QueryView{q.left, q.right});
      bool positive = store.probe(QueryView{q.left, q.right});
      if (!empty) {
        if (!positive)
          throw std::logic_error("false negative in segmented store");
        continue;
      }
      n_empty++;
      if (positive) false_pos++;
      store.observe_empty_query(QueryView{q.left, q.right}, cfg.sample_every);
      if (cfg.rebuild_period > 0 && (executed + 1) % cfg.rebuild_period == 0)
        store.rebuild_next();
    }
    RunRow row;
    std::ostringstream id;
    id << "shift;mode="
       << (cfg.mode == ShiftMode::kGradual ? "gradual" : "extreme")
       << ";batch=" << batch << ";rebuilds="
       << (cfg.rebuild_period > 0 ? "on" : "off");
    row.workload = id.str();
    row.family = family_name(cfg.family);
    row.bpk = cfg.bpk;
    row.l1 = store.segment_design(0).l1;
    row.l2 = store.segment_design(0).l2;
    row.observed_fpr =
        n_empty > 0 ? static_cast<double>(false_pos) / n_empty : -1;
    row.n_eval_queries = n_empty;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace prf
