#pragma once

#include <deque>
#include <string>
#include <vector>

#include "prf/cpfpr.hpp"
#include "prf/filters.hpp"
#include "prf/workloads.hpp"

namespace prf {

// One benchmark result row. observed_fpr is computed only over queries that
// are truly empty; a false negative anywhere aborts the run. Fields that do
// not apply to a row (e.g. predicted FPR of a per-batch shift row) carry -1.
struct RunRow {
  std::string workload;
  std::string family;
  double bpk = 0;
  unsigned l1 = 0, l2 = 0;
  double split = 0;
  double predicted_fpr = -1, observed_fpr = -1;
  double mean_trie_probes = 0, mean_bloom_probes = 0;
  double model_ms = 0, build_ms = 0;
  uint64_t n_eval_queries = 0;  // empty queries behind observed_fpr
};

std::string csv_header();
std::string to_csv(const RunRow& row);
// path "-" or "" writes to stdout.
void write_csv(const std::vector<RunRow>& rows, const std::string& path);

struct HarnessConfig {
  WorkloadSpec workload;
  double bpk = 10.0;
  FilterFamily family = FilterFamily::kProteus;
  SelectOptions select;
  // sweep-only: stride through the design grid (1 = every design)
  unsigned l1_step = 1;
  unsigned l2_step = 1;
};

// Loaded (or generated) inputs shared across harness entry points.
struct WorkloadData {
  KeySet keys;
  GeneratedQueries queries;
  uint64_t budget_bits = 0;
};
WorkloadData prepare_workload(const WorkloadSpec& spec, double bpk);

// Model + build the selected design, evaluate every labeled query.
std::vector<RunRow> run_eval(const HarnessConfig& cfg);
RunRow eval_design(const WorkloadData& data, const HarnessConfig& cfg,
                   const DesignPoint& design, double predicted_fpr,
                   double model_ms);

// Predicted and observed FPR for every feasible design in the family's grid;
// infeasible trie depths are emitted with -1 markers.
std::vector<RunRow> run_sweep(const HarnessConfig& cfg);

enum class ShiftMode { kGradual, kExtreme };

struct ShiftConfig {
  WorkloadSpec keys_spec;   // key distribution and count
  WorkloadSpec start;       // query shape at ratio 0
  WorkloadSpec end;         // query shape at ratio 1
  ShiftMode mode = ShiftMode::kGradual;
  unsigned batches = 20;
  uint64_t batch_queries = 20000;
  unsigned segments = 16;
  uint64_t rebuild_period = 2500;  // queries per rebuild event; 0 disables
  uint64_t queue_capacity = 20000;
  uint64_t sample_every = 100;
  double bpk = 10.0;
  FilterFamily family = FilterFamily::kProteus;
  SelectOptions select;
};

// Range-partitioned segment store with one filter per segment and a FIFO
// queue of recent empty queries feeding rebuilds.
class SegmentedStore {
 public:
  SegmentedStore(const KeySet& keys, unsigned segments, double bpk,
                 FilterFamily family, const SelectOptions& select,
                 uint64_t seed);

  void seed_queue(const QuerySet& sample, uint64_t capacity);
  void observe_empty_query(QueryView q, uint64_t sample_every);
  void rebuild_next();  // round-robin compaction stand-in
  bool probe(QueryView q) const;
  bool truly_empty(QueryView q) const;
  const DesignPoint& segment_design(size_t i) const;
  size_t segment_count() const { return segs_.size(); }
  uint64_t queue_size() const { return queue_.size(); }

 private:
  struct Segment {
    KeySet keys;
    Key lo, hi;
    AnyFilter filter;
    DesignPoint design;
  };
  void rebuild_segment(size_t idx);

  std::vector<Segment> segs_;
  std::deque<std::pair<Key, Key>> queue_;
  uint64_t queue_capacity_ = 20000;
  uint64_t empty_seen_ = 0;
  size_t next_rebuild_ = 0;
  double bpk_;
  FilterFamily family_;
  SelectOptions select_;
  uint64_t seed_;
  unsigned width_;
};

// Streams batches of queries whose distribution shifts from `start` to `end`,
// reporting per-batch FPR rows.
std::vector<RunRow> run_shift(const ShiftConfig& cfg);

}  // namespace prf
