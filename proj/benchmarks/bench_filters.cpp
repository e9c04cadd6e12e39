#include <benchmark/benchmark.h>

#include "prf/cpfpr.hpp"
#include "prf/filters.hpp"
#include "prf/workloads.hpp"

using namespace prf;

namespace {

WorkloadSpec bench_spec(QueryKind kind, uint64_t n_keys) {
  WorkloadSpec spec;
  spec.key_dist = KeyDist::kNormal;
  spec.query_kind = kind;
  spec.n_keys = n_keys;
  spec.n_queries = 10000;
  spec.n_sample = 20000;
  spec.rmax = 1 << 12;
  spec.seed = 90210;
  return spec;
}

struct Fixture {
  KeySet keys;
  GeneratedQueries gq;
  uint64_t budget;
  Fixture(QueryKind kind, uint64_t n_keys) {
    WorkloadSpec spec = bench_spec(kind, n_keys);
    keys = gen_keys(spec);
    gq = gen_queries(spec, keys);
    budget = 10 * keys.size();
  }
};

Fixture& fixture() {
  static Fixture f(QueryKind::kSplit, 200000);
  return f;
}

}  // namespace

static void BM_BloomInsert(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    BloomFilter bf(f.budget, f.keys.size(), 48, 7);
    for (size_t i = 0; i < f.keys.size(); i++) bf.insert_prefix_of(f.keys[i]);
    benchmark::DoNotOptimize(bf.bits().data());
  }
  state.SetItemsProcessed(state.iterations() * f.keys.size());
}
BENCHMARK(BM_BloomInsert)->Unit(benchmark::kMillisecond);

static void BM_TrieBuild(benchmark::State& state) {
  Fixture& f = fixture();
  KeyPrefixCounts counts = count_key_prefixes(f.keys);
  unsigned l1 = 0;
  for (unsigned l = 1; l <= 64; l++)
    if (trie_mem(l, counts) <= f.budget) l1 = l;
  TriePlan plan = plan_trie(l1, counts.counts);
  for (auto _ : state) {
    UniformTrie t = UniformTrie::build_from_keys(f.keys, l1, plan.dense_cutoff);
    benchmark::DoNotOptimize(t.size_bits());
  }
  state.SetLabel("depth " + std::to_string(l1));
}
BENCHMARK(BM_TrieBuild)->Unit(benchmark::kMillisecond);

static void BM_ProteusQuery(benchmark::State& state) {
  Fixture& f = fixture();
  ModelVerdict v =
      select_design(f.keys, f.gq.sample, f.budget, FilterFamily::kProteus);
  DesignPoint d = v.chosen;
  d.budget_bits = f.budget;
  ProteusFilter filter = ProteusFilter::build(f.keys, d, 3);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter.query(f.gq.eval[i]).positive);
    i = (i + 1) % f.gq.eval.size();
  }
}
BENCHMARK(BM_ProteusQuery);

static void BM_ModelSelect(benchmark::State& state) {
  Fixture& f = fixture();
  KeyPrefixCounts counts = count_key_prefixes(f.keys);
  SampleStats stats = SampleStats::extract(f.keys, f.gq.sample);
  for (auto _ : state) {
    ModelVerdict v =
        select_design(counts, stats, f.budget, FilterFamily::kProteus);
    benchmark::DoNotOptimize(v.expected_fpr);
  }
  state.SetLabel("sample " + std::to_string(stats.size()));
}
BENCHMARK(BM_ModelSelect)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
