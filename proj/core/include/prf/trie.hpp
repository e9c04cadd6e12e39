#pragma once

#include <type_traits>
#include <vector>

#include "prf/bitvec.hpp"
#include "prf/key.hpp"
#include "prf/trie_cost.hpp"

namespace prf {

// Non-owning callable reference; avoids per-call allocation in probe loops.
struct VisitRef {
  void* ctx = nullptr;
  bool (*fn)(void*, KeyView) = nullptr;
  bool operator()(KeyView k) const { return fn(ctx, k); }
};

// Succinct trie over all unique l1-bit key prefixes, every leaf at logical
// depth exactly l1. Top levels use a dense 2-bits-per-node bitmap encoding,
// lower levels a sparse 3-bits-per-edge encoding with louds delimiters.
// Once a branch covers a single prefix, its remaining bits move to a raw
// suffix store instead of further trie levels.
//
// Membership at l1 granularity is exact: no false positives, no false
// negatives. Immutable after build.
class UniformTrie {
 public:
  UniformTrie() = default;

  // prefixes: sorted unique keys of width l1 >= 1.
  static UniformTrie build(const KeySet& prefixes, unsigned dense_cutoff);

  // Convenience: extract, dedupe, and encode the l1-bit prefixes of a sorted
  // key set.
  static UniformTrie build_from_keys(const KeySet& keys, unsigned l1,
                                     unsigned dense_cutoff);

  unsigned depth() const { return depth_; }
  unsigned dense_cutoff() const { return cutoff_; }
  uint64_t num_prefixes() const { return num_prefixes_; }

  bool contains(KeyView prefix) const;

  // Visits the stored prefixes within [first, last] in ascending order,
  // stopping early when the visitor returns true. Returns true when stopped.
  // Visited views are only valid during the call.
  template <typename F>
  bool for_each_in_range(KeyView first, KeyView last, F&& visit) const {
    using Fn = std::remove_reference_t<F>;
    VisitRef ref{const_cast<void*>(static_cast<const void*>(&visit)),
                 [](void* ctx, KeyView k) { return (*static_cast<Fn*>(ctx))(k); }};
    return probe_range(first, last, ref);
  }

  bool probe_range(KeyView first, KeyView last, VisitRef visit) const;

  std::vector<Key> collect_range(KeyView first, KeyView last) const;

  // Exact footprint: all bit arrays, rank directories, suffix store, and
  // per-level registers.
  uint64_t size_bits() const;

 private:
  struct Level {
    bool dense = false;
    BitVec labels;     // dense: 2 bits/node; sparse: label value per edge
    BitVec has_child;  // dense: 2 bits/node; sparse: 1 bit/edge
    BitVec louds;      // sparse only: first-edge-of-node markers
    uint64_t suffix_start = 0;
    uint64_t edges = 0;
  };

  struct Cursor {  // resolved location of an edge inside a level
    uint64_t pos = 0;
    bool exists = false;
    bool has_child = false;
  };

  Cursor find_edge(unsigned level_idx, uint64_t node_ord, unsigned bit) const;
  uint64_t child_ordinal(unsigned level_idx, uint64_t pos) const;
  uint64_t terminal_index(unsigned level_idx, uint64_t pos) const;
  bool suffix_matches(unsigned depth_reached, uint64_t t_idx, KeyView key) const;
  bool walk_range(unsigned d, uint64_t node_ord, bool lo_tight, bool hi_tight,
                  KeyView first, KeyView last, Word* path, VisitRef visit) const;

  std::vector<Level> levels_;  // levels_[d-1] holds the edges into depth d
  RawBits suffixes_;
  unsigned depth_ = 0;
  unsigned cutoff_ = 0;
  uint64_t num_prefixes_ = 0;
};

}  // namespace prf
