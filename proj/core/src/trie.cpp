#include "prf/trie.hpp"

#include <stdexcept>

namespace prf {

namespace {

// Reads n <= 64 bits of a key starting at `from`, right-aligned.
uint64_t kv_read_bits(KeyView k, unsigned from, unsigned n) {
  assert(from + n <= k.width && n <= 64);
  uint64_t v = 0;
  unsigned i = from, left = n;
  while (left > 0) {
    unsigned wi = i / kWordBits, off = i % kWordBits;
    unsigned take = std::min<unsigned>(kWordBits - off, left);
    Word chunk = (k.w[wi] << off) >> (kWordBits - take);
    v = (v << take) | chunk;
    i += take;
    left -= take;
  }
  return v;
}

void kv_write_bits(Word* w, unsigned from, unsigned n, uint64_t val) {
  assert(n <= 64);
  unsigned i = from, left = n;
  while (left > 0) {
    unsigned wi = i / kWordBits, off = i % kWordBits;
    unsigned take = std::min<unsigned>(kWordBits - off, left);
    Word chunk = (val >> (left - take)) & (take == 64 ? ~Word(0)
                                                      : ((Word(1) << take) - 1));
    Word mask = (take == 64 ? ~Word(0) : ((Word(1) << take) - 1))
                << (kWordBits - off - take);
    w[wi] = (w[wi] & ~mask) | (chunk << (kWordBits - off - take));
    i += take;
    left -= take;
  }
}

}  // namespace

UniformTrie UniformTrie::build(const KeySet& prefixes, unsigned dense_cutoff) {
  if (prefixes.empty())
    throw std::invalid_argument("trie build: empty prefix set");
  unsigned l1 = prefixes.width();
  if (l1 < 1) throw std::invalid_argument("trie build: zero-width prefixes");

  UniformTrie t;
  t.depth_ = l1;
  t.cutoff_ = std::min(dense_cutoff, l1);
  t.num_prefixes_ = prefixes.size();
  t.levels_.resize(l1);

  uint32_t n = static_cast<uint32_t>(prefixes.size());
  std::vector<std::pair<uint32_t, uint32_t>> groups{{0, n}}, next;

  for (unsigned d = 1; d <= l1; d++) {
    Level& lv = t.levels_[d - 1];
    lv.dense = d <= t.cutoff_;
    lv.suffix_start = t.suffixes_.size();
    next.clear();

    for (auto [gb, ge] : groups) {
      // first index whose bit (d-1) is set
      uint32_t lo = gb, hi = ge;
      while (lo < hi) {
        uint32_t mid = lo + (hi - lo) / 2;
        if (kv_bit(prefixes[mid], d - 1))
          hi = mid;
        else
          lo = mid + 1;
      }
      uint32_t mid = lo;
      const uint32_t sub_b[2] = {gb, mid};
      const uint32_t sub_e[2] = {mid, ge};

      bool first_edge = true;
      for (unsigned b = 0; b < 2; b++) {
        bool present = sub_e[b] > sub_b[b];
        bool internal = present && (sub_e[b] - sub_b[b] >= 2);
        assert(!(internal && d == l1));  // input must be unique at depth l1
        if (lv.dense) {
          // bits appended per node below; record edge/terminal bookkeeping
        } else if (present) {
          lv.labels.push_back(b == 1);
          lv.has_child.push_back(internal);
          lv.louds.push_back(first_edge);
          first_edge = false;
        }
        if (present) {
          lv.edges++;
          if (!internal && d < l1)
            t.suffixes_.append_range(prefixes[sub_b[b]].w, d, l1 - d);
          if (internal) next.emplace_back(sub_b[b], sub_e[b]);
        }
      }
      if (lv.dense) {
        bool has0 = sub_e[0] > sub_b[0], has1 = sub_e[1] > sub_b[1];
        bool int0 = has0 && (sub_e[0] - sub_b[0] >= 2);
        bool int1 = has1 && (sub_e[1] - sub_b[1] >= 2);
        lv.labels.push_back(has0);
        lv.labels.push_back(has1);
        lv.has_child.push_back(int0);
        lv.has_child.push_back(int1);
      }
    }
    lv.labels.freeze();
    lv.has_child.freeze();
    lv.louds.freeze();
    groups.swap(next);
  }
  return t;
}

UniformTrie UniformTrie::build_from_keys(const KeySet& keys, unsigned l1,
                                         unsigned dense_cutoff) {
  if (keys.empty()) throw std::invalid_argument("trie build: empty key set");
  if (l1 < 1 || l1 > keys.width())
    throw std::invalid_argument("trie build: bad depth");
  KeySet prefixes(l1);
  KeyScratch scratch;
  for (size_t i = 0; i < keys.size(); i++) {
    if (i > 0 && kv_lcp(keys[i - 1], keys[i]) >= l1) continue;
    kv_copy_prefix(keys[i], l1, scratch.data());
    prefixes.push_back(scratch.view(l1));
  }
  return build(prefixes, dense_cutoff);
}

UniformTrie::Cursor UniformTrie::find_edge(unsigned level_idx,
                                           uint64_t node_ord,
                                           unsigned bit) const {
  const Level& lv = levels_[level_idx];
  Cursor c;
  if (lv.dense) {
    c.pos = 2 * node_ord + bit;
    c.exists = lv.labels.get(c.pos);
    c.has_child = c.exists && lv.has_child.get(c.pos);
    return c;
  }
  uint64_t s = lv.louds.select1(node_ord + 1);
  uint64_t e = (node_ord + 2 <= lv.louds.ones()) ? lv.louds.select1(node_ord + 2)
                                                 : lv.edges;
  for (uint64_t p = s; p < e; p++) {
    if (lv.labels.get(p) == (bit == 1)) {
      c.pos = p;
      c.exists = true;
      c.has_child = lv.has_child.get(p);
      return c;
    }
  }
  return c;
}

uint64_t UniformTrie::child_ordinal(unsigned level_idx, uint64_t pos) const {
  return levels_[level_idx].has_child.rank1(pos + 1) - 1;
}

uint64_t UniformTrie::terminal_index(unsigned level_idx, uint64_t pos) const {
  const Level& lv = levels_[level_idx];
  if (lv.dense) return lv.labels.rank1(pos) - lv.has_child.rank1(pos);
  return pos - lv.has_child.rank1(pos);
}

bool UniformTrie::suffix_matches(unsigned depth_reached, uint64_t t_idx,
                                 KeyView key) const {
  unsigned len = depth_ - depth_reached;
  uint64_t spos = levels_[depth_reached - 1].suffix_start +
                  t_idx * static_cast<uint64_t>(len);
  for (unsigned off = 0; off < len; off += 64) {
    unsigned take = std::min(64u, len - off);
    if (suffixes_.read(spos + off, take) !=
        kv_read_bits(key, depth_reached + off, take))
      return false;
  }
  return true;
}

bool UniformTrie::contains(KeyView prefix) const {
  assert(prefix.width == depth_);
  uint64_t node = 0;
  for (unsigned d = 1; d <= depth_; d++) {
    Cursor c = find_edge(d - 1, node, kv_bit(prefix, d - 1));
    if (!c.exists) return false;
    if (c.has_child) {
      node = child_ordinal(d - 1, c.pos);
      continue;
    }
    if (d == depth_) return true;
    return suffix_matches(d, terminal_index(d - 1, c.pos), prefix);
  }
  return true;
}

bool UniformTrie::walk_range(unsigned d, uint64_t node_ord, bool lo_tight,
                             bool hi_tight, KeyView first, KeyView last,
                             Word* path, VisitRef visit) const {
  unsigned blo = lo_tight ? kv_bit(first, d) : 0;
  unsigned bhi = hi_tight ? kv_bit(last, d) : 1;
  for (unsigned b = blo; b <= bhi; b++) {
    Cursor c = find_edge(d, node_ord, b);
    if (!c.exists) continue;
    kv_write_bits(path, d, 1, b);
    bool nlo = lo_tight && b == kv_bit(first, d);
    bool nhi = hi_tight && b == kv_bit(last, d);
    unsigned cd = d + 1;
    if (c.has_child) {
      if (walk_range(cd, child_ordinal(d, c.pos), nlo, nhi, first, last, path,
                     visit))
        return true;
      continue;
    }
    if (cd < depth_) {
      unsigned len = depth_ - cd;
      uint64_t spos =
          levels_[d].suffix_start + terminal_index(d, c.pos) * uint64_t(len);
      for (unsigned off = 0; off < len; off += 64) {
        unsigned take = std::min(64u, len - off);
        kv_write_bits(path, cd + off, take, suffixes_.read(spos + off, take));
      }
    }
    KeyView cand{path, depth_};
    if (nlo && kv_less(cand, first)) continue;
    if (nhi && kv_less(last, cand)) continue;
    if (visit(cand)) return true;
  }
  return false;
}

bool UniformTrie::probe_range(KeyView first, KeyView last,
                              VisitRef visit) const {
  if (first.width != depth_ || last.width != depth_)
    throw std::invalid_argument("range probe width must equal trie depth");
  assert(!kv_less(last, first));
  KeyScratch path;
  return walk_range(0, 0, true, true, first, last, path.data(), visit);
}

std::vector<Key> UniformTrie::collect_range(KeyView first, KeyView last) const {
  std::vector<Key> out;
  for_each_in_range(first, last, [&](KeyView k) {
    out.emplace_back(k.width, std::span<const Word>(k.w, k.nwords()));
    return false;
  });
  return out;
}

uint64_t UniformTrie::size_bits() const {
  uint64_t total = 128;  // header: depth, cutoff, prefix count
  for (const Level& lv : levels_) {
    total += lv.labels.size_bits() + lv.has_child.size_bits();
    if (!lv.dense) total += lv.louds.size_bits();
    total += trie_cost::kPerLevelBits;
  }
  total += suffixes_.size_bits();
  return total;
}

}  // namespace prf
