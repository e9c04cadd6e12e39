// Command-line driver for the range-filter benchmark harness.
//
//   prf gen    --key-dist uniform --n-keys 100000 --out-keys keys.bin ...
//   prf eval   --key-dist normal --query-kind split --bpk 10 --out eval.csv
//   prf sweep  --filter proteus --bpk 10 --out grid.csv
//   prf shift  --start-kind uniform --end-kind correlated --mode gradual ...
//   prf plot   --in grid.csv
//
// Exit status: 0 on success, 1 on usage/input errors, 2 when a filter
// invariant is violated (e.g. a false negative).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "prf/harness.hpp"

using namespace prf;

namespace {

struct SharedArgs {
  std::string keys_path, queries_path;
  std::string key_dist = "uniform", query_kind = "uniform";
  uint64_t n_keys = 100000, n_queries = 100000, sample_size = 20000;
  uint64_t rmax = 256, split_uniform_rmax = 0, corr_degree = 1024, seed = 1;
  unsigned key_bytes = 0;
  double bpk = 10.0;
  std::string filter = "proteus";
  std::string out;
  unsigned max_bloom_lengths = 0;

  void attach(CLI::App* app, bool with_queries = true) {
    app->add_option("--keys", keys_path, "load keys from a binary u64 file");
    app->add_option("--key-dist", key_dist, "uniform|normal")
        ->check(CLI::IsMember({"uniform", "normal"}));
    app->add_option("--n-keys", n_keys, "number of keys to generate");
    app->add_option("--key-bytes", key_bytes,
                    "byte-string keys of this padded length (0 = u64 keys)");
    if (with_queries) {
      app->add_option("--queries", queries_path, "load queries from a text file");
      app->add_option("--query-kind", query_kind,
                      "uniform|correlated|split|point")
          ->check(CLI::IsMember({"uniform", "correlated", "split", "point", "real"}));
      app->add_option("--n-queries", n_queries, "evaluation queries");
      app->add_option("--rmax", rmax, "max range size (0 = point queries)");
      app->add_option("--split-uniform-rmax", split_uniform_rmax,
                      "range size for the uniform half of a split workload");
      app->add_option("--corr-degree", corr_degree,
                      "max key-to-query distance for correlated queries");
      app->add_option("--sample-size", sample_size, "empty sample queries");
    }
    app->add_option("--bpk", bpk, "bits per key budget");
    app->add_option("--filter", filter, "proteus|pbf1|pbf2")
        ->check(CLI::IsMember({"proteus", "pbf1", "pbf2"}));
    app->add_option("--seed", seed, "workload seed");
    app->add_option("--max-bloom-lengths", max_bloom_lengths,
                    "coarse design search: model at most this many Bloom "
                    "prefix lengths (0 = all)");
    app->add_option("--out", out, "CSV output path (default stdout)");
  }

  WorkloadSpec spec() const {
    WorkloadSpec s;
    s.key_dist = keys_path.empty() ? key_dist_from_name(key_dist) : KeyDist::kFile;
    s.query_kind = query_kind_from_name(query_kind);
    s.n_keys = n_keys;
    s.n_queries = n_queries;
    s.n_sample = sample_size;
    s.rmax = s.query_kind == QueryKind::kPoint ? 0 : rmax;
    s.split_uniform_rmax = split_uniform_rmax;
    s.corr_degree = corr_degree;
    s.seed = seed;
    s.key_bytes = key_bytes;
    s.keys_path = keys_path;
    s.queries_path = queries_path;
    if (s.rmax == 1)
      throw CLI::ValidationError("--rmax", "must be 0 (points) or >= 2");
    return s;
  }

  HarnessConfig harness() const {
    HarnessConfig cfg;
    cfg.workload = spec();
    cfg.bpk = bpk;
    cfg.family = family_from_name(filter);
    cfg.select.max_bloom_lengths = max_bloom_lengths;
    return cfg;
  }
};

int cmd_gen(const SharedArgs& args, const std::string& out_keys,
            const std::string& out_queries) {
  WorkloadSpec spec = args.spec();
  KeySet keys = gen_keys(spec);
  if (!out_keys.empty()) {
    save_keys_u64(out_keys, keys);
    std::cerr << "wrote " << keys.size() << " keys to " << out_keys << "\n";
  }
  if (!out_queries.empty()) {
    GeneratedQueries gq = gen_queries(spec, keys);
    save_queries_text(out_queries, gq.eval);
    std::cerr << "wrote " << gq.eval.size() << " queries to " << out_queries
              << "\n";
  }
  return 0;
}

int cmd_plot(const std::string& in_csv) {
  // Minimal text rendering of a sweep CSV: l1 rows, l2 columns, observed FPR
  // bucketed into shade characters. Infeasible cells print '#'.
  std::ifstream in(in_csv);
  if (!in) throw FormatError("cannot open csv: " + in_csv);
  std::string line;
  std::getline(in, line);  // header
  std::map<std::pair<unsigned, unsigned>, double> grid;
  unsigned max_l1 = 0, max_l2 = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t c = line.find(',', pos);
      if (c == std::string::npos) c = line.size();
      cols.push_back(line.substr(pos, c - pos));
      pos = c + 1;
    }
    if (cols.size() < 13) continue;
    unsigned l1 = std::stoul(cols[3]), l2 = std::stoul(cols[4]);
    double obs = std::stod(cols[7]);
    grid[{l1, l2}] = obs;
    max_l1 = std::max(max_l1, l1);
    max_l2 = std::max(max_l2, l2);
  }
  const char* shades = " .:-=+*%@";
  std::cout << "observed FPR, rows l1 (trie depth), cols l2 (bloom length)\n";
  for (unsigned l1 = 0; l1 <= max_l1; l1++) {
    bool row_used = false;
    for (unsigned l2 = 0; l2 <= max_l2 && !row_used; l2++)
      row_used = grid.count({l1, l2}) > 0;
    if (!row_used) continue;
    std::cout.width(4);
    std::cout << l1 << " |";
    for (unsigned l2 = 0; l2 <= max_l2; l2++) {
      auto it = grid.find({l1, l2});
      if (it == grid.end()) {
        std::cout << ' ';
      } else if (it->second < 0) {
        std::cout << '#';
      } else {
        int idx = std::min(8, (int)std::floor(it->second * 9.0));
        std::cout << shades[idx];
      }
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"protean range filter benchmark harness"};
  app.require_subcommand(1);

  SharedArgs gen_args, eval_args, sweep_args, shift_args;
  std::string out_keys, out_queries;
  unsigned l1_step = 1, l2_step = 1;

  auto* gen = app.add_subcommand("gen", "generate key/query files");
  gen_args.attach(gen);
  gen->add_option("--out-keys", out_keys, "key file to write");
  gen->add_option("--out-queries", out_queries, "query file to write");

  auto* eval = app.add_subcommand("eval", "model, build, and evaluate");
  eval_args.attach(eval);

  auto* sweep = app.add_subcommand("sweep", "evaluate the whole design grid");
  sweep_args.attach(sweep);
  sweep->add_option("--l1-step", l1_step, "stride through trie depths");
  sweep->add_option("--l2-step", l2_step, "stride through Bloom lengths");

  auto* shift = app.add_subcommand("shift", "shifting-workload simulation");
  shift_args.attach(shift);
  std::string start_kind = "uniform", end_kind = "correlated", mode = "gradual";
  unsigned batches = 20, segments = 16;
  uint64_t batch_queries = 20000, rebuild_period = 2500, queue_size = 20000,
           sample_every = 100, start_rmax = 0, end_rmax = 0;
  shift->add_option("--start-kind", start_kind, "initial query kind");
  shift->add_option("--end-kind", end_kind, "final query kind");
  shift->add_option("--batches", batches, "batches to report");
  shift->add_option("--batch-queries", batch_queries, "queries per batch");
  shift->add_option("--mode", mode, "gradual|extreme")
      ->check(CLI::IsMember({"gradual", "extreme"}));
  shift->add_option("--segments", segments, "range-partitioned segments");
  shift->add_option("--rebuild-period", rebuild_period,
                    "queries between filter rebuilds (0 = never rebuild)");
  shift->add_option("--queue-size", queue_size, "sample query queue capacity");
  shift->add_option("--sample-every", sample_every,
                    "queue every Nth executed empty query");
  shift->add_option("--start-rmax", start_rmax, "rmax for the start kind");
  shift->add_option("--end-rmax", end_rmax, "rmax for the end kind");

  auto* plot = app.add_subcommand("plot", "render a sweep CSV as text");
  std::string plot_in;
  plot->add_option("--in", plot_in, "CSV produced by sweep")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_args, out_keys, out_queries);
    if (eval->parsed()) {
      write_csv(run_eval(eval_args.harness()), eval_args.out);
      return 0;
    }
    if (sweep->parsed()) {
      HarnessConfig cfg = sweep_args.harness();
      cfg.l1_step = l1_step;
      cfg.l2_step = l2_step;
      write_csv(run_sweep(cfg), sweep_args.out);
      return 0;
    }
    if (shift->parsed()) {
      ShiftConfig cfg;
      cfg.keys_spec = shift_args.spec();
      cfg.start = cfg.keys_spec;
      cfg.start.query_kind = query_kind_from_name(start_kind);
      if (start_rmax) cfg.start.rmax = start_rmax;
      cfg.end = cfg.keys_spec;
      cfg.end.query_kind = query_kind_from_name(end_kind);
      if (end_rmax) cfg.end.rmax = end_rmax;
      cfg.mode = mode == "extreme" ? ShiftMode::kExtreme : ShiftMode::kGradual;
      cfg.batches = batches;
      cfg.batch_queries = batch_queries;
      cfg.segments = segments;
      cfg.rebuild_period = rebuild_period;
      cfg.queue_capacity = queue_size;
      cfg.sample_every = sample_every;
      cfg.bpk = shift_args.bpk;
      cfg.family = family_from_name(shift_args.filter);
      cfg.select.max_bloom_lengths = shift_args.max_bloom_lengths;
      write_csv(run_shift(cfg), shift_args.out);
      return 0;
    }
    if (plot->parsed()) return cmd_plot(plot_in);
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
