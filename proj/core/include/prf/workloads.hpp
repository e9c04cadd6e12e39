#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prf/errors.hpp"
#include "prf/key.hpp"
#include "prf/rng.hpp"

namespace prf {

enum class KeyDist { kUniform, kNormal, kFile };
enum class QueryKind { kUniform, kCorrelated, kSplit, kPoint, kReal };

KeyDist key_dist_from_name(const std::string& s);
QueryKind query_kind_from_name(const std::string& s);
const char* key_dist_name(KeyDist d);
const char* query_kind_name(QueryKind q);

struct WorkloadSpec {
  KeyDist key_dist = KeyDist::kUniform;
  QueryKind query_kind = QueryKind::kUniform;
  uint64_t n_keys = 100000;
  uint64_t n_queries = 100000;
  uint64_t n_sample = 20000;
  uint64_t rmax = 256;        // 0 <=> point queries
  // split workloads may give their uniform half a different (usually much
  // larger) range size; 0 means "use rmax"
  uint64_t split_uniform_rmax = 0;
  uint64_t corr_degree = 1024;
  uint64_t seed = 1;
  unsigned key_bytes = 0;     // 0 <=> 64-bit integer keys
  std::string keys_path;      // key_dist == kFile
  std::string queries_path;   // load queries instead of generating

  unsigned key_width_bits() const { return key_bytes == 0 ? 64 : key_bytes * 8; }
  std::string id() const;
};

// Sorted, unique keys, deterministic per (spec, seed). Colliding draws are
// re-drawn until n_keys distinct values exist.
KeySet gen_keys(const WorkloadSpec& spec);

// Byte-string keys of spec.key_bytes bytes, null-padded to fixed width.
KeySet gen_string_keys(const WorkloadSpec& spec);

struct GeneratedQueries {
  QuerySet eval;               // full stream, labeled
  std::vector<uint8_t> empty;  // 1 <=> truly empty against the key set
  QuerySet sample;             // empty queries only, independent seed stream
};

// `left_pool` supplies left bounds for QueryKind::kReal (values drawn from a
// dataset rather than synthesized).
GeneratedQueries gen_queries(const WorkloadSpec& spec, const KeySet& keys,
                             const KeySet* left_pool = nullptr);

// One labeled query from the given stream; used by the shifting-workload
// simulation to interleave two distributions query by query.
class QueryStream {
 public:
  QueryStream(const WorkloadSpec& spec, const KeySet& keys, uint64_t seed);
  RangeQuery next();                  // any query, labeled by caller
  RangeQuery next_empty();            // rejection-sampled empty query

 private:
  const WorkloadSpec spec_;
  const KeySet& keys_;
  Rng rng_;
};

// True iff [left, right] contains no key (binary search).
bool range_empty(const KeySet& keys, KeyView left, KeyView right);

// --- file formats -----------------------------------------------------------
// Integer key files: 8-byte little-endian count, then count 8-byte
// little-endian values. Query files: one "left,right" pair per line, decimal
// for 64-bit integer keys and hex digits for byte-string keys.

KeySet load_sosd(const std::string& path);
void save_keys_u64(const std::string& path, const KeySet& keys);

// Newline-delimited raw byte strings, each padded to `pad_to` bytes.
KeySet load_string_keys(const std::string& path, size_t pad_to);

void save_queries_text(const std::string& path, const QuerySet& queries);
QuerySet load_queries_text(const std::string& path, unsigned width_bits);

}  // namespace prf
