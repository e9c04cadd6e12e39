#include "prf/workloads.hpp"

#include "prf/keyspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace prf {

KeyDist key_dist_from_name(const std::string& s) {
  if (s == "uniform") return KeyDist::kUniform;
  if (s == "normal") return KeyDist::kNormal;
  if (s == "file") return KeyDist::kFile;
  throw std::invalid_argument("unknown key distribution: " + s);
}

QueryKind query_kind_from_name(const std::string& s) {
  if (s == "uniform") return QueryKind::kUniform;
  if (s == "correlated") return QueryKind::kCorrelated;
  if (s == "split") return QueryKind::kSplit;
  if (s == "point") return QueryKind::kPoint;
  if (s == "real") return QueryKind::kReal;
  throw std::invalid_argument("unknown query kind: " + s);
}

const char* key_dist_name(KeyDist d) {
  switch (d) {
    case KeyDist::kUniform: return "uniform";
    case KeyDist::kNormal: return "normal";
    case KeyDist::kFile: return "file";
  }
  return "?";
}

const char* query_kind_name(QueryKind q) {
  switch (q) {
    case QueryKind::kUniform: return "uniform";
    case QueryKind::kCorrelated: return "correlated";
    case QueryKind::kSplit: return "split";
    case QueryKind::kPoint: return "point";
    case QueryKind::kReal: return "real";
  }
  return "?";
}

std::string WorkloadSpec::id() const {
  std::ostringstream os;
  os << key_dist_name(key_dist) << "-" << query_kind_name(query_kind)
     << ";n=" << n_keys << ";q=" << n_queries << ";rmax=" << rmax
     << ";corr=" << corr_degree << ";seed=" << seed;
  if (key_bytes > 0) os << ";bytes=" << key_bytes;
  return os.str();
}

namespace {

constexpr uint64_t kKeyStream = 0x4b455953ULL;     // stream tags
constexpr uint64_t kEvalStream = 0x4556414cULL;
constexpr uint64_t kSampleStream = 0x534d504cULL;

uint64_t normal_u64(Rng& rng) {
  // mean 2^63, sigma 0.01 * 2^64, rounded and clamped to the key space.
  // Conversion must stay unsigned: values above 2^63 overflow llround.
  const long double mu = 9223372036854775808.0L;      // 2^63
  const long double sigma = 184467440737095516.16L;   // 0.01 * 2^64
  long double v = mu + (long double)rng.normal() * sigma + 0.5L;
  if (v < 0.0L) return 0;
  if (v >= 18446744073709551615.0L) return ~uint64_t(0);
  return static_cast<uint64_t>(v);
}

}  // namespace

KeySet gen_keys(const WorkloadSpec& spec) {
  if (spec.key_bytes > 0) return gen_string_keys(spec);
  if (spec.key_dist == KeyDist::kFile) {
    KeySet raw = load_sosd(spec.keys_path);
    raw.sort();
    // dedupe; subsample uniformly when the file holds more than n_keys
    std::vector<uint64_t> vals;
    vals.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); i++) {
      uint64_t v = raw.key(i).as_u64();
      if (vals.empty() || vals.back() != v) vals.push_back(v);
    }
    if (spec.n_keys > 0 && vals.size() > spec.n_keys) {
      Rng rng(spec.seed ^ kKeyStream);
      std::vector<uint64_t> picked;
      picked.reserve(spec.n_keys);
      // reservoir-free: sample indices without replacement via shuffle prefix
      std::vector<uint32_t> idx(vals.size());
      for (size_t i = 0; i < idx.size(); i++) idx[i] = (uint32_t)i;
      for (uint64_t i = 0; i < spec.n_keys; i++) {
        uint64_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
        picked.push_back(vals[idx[i]]);
      }
      std::sort(picked.begin(), picked.end());
      vals = std::move(picked);
    }
    return KeySet::from_u64(vals);
  }

  if (spec.n_keys == 0) throw std::invalid_argument("gen_keys: n_keys == 0");
  Rng rng(spec.seed ^ kKeyStream);
  std::unordered_set<uint64_t> seen;
  seen.reserve(spec.n_keys * 2);
  std::vector<uint64_t> vals;
  vals.reserve(spec.n_keys);
  while (vals.size() < spec.n_keys) {
    uint64_t v = spec.key_dist == KeyDist::kNormal ? normal_u64(rng) : rng.next();
    if (seen.insert(v).second) vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  return KeySet::from_u64(vals);
}

KeySet gen_string_keys(const WorkloadSpec& spec) {
  if (spec.key_bytes == 0)
    throw std::invalid_argument("gen_string_keys: key_bytes == 0");
  if (spec.n_keys == 0) throw std::invalid_argument("gen_string_keys: n_keys == 0");
  unsigned width = spec.key_bytes * 8;
  Rng rng(spec.seed ^ kKeyStream);
  KeySet out(width);
  out.reserve(spec.n_keys);
  KeyScratch s;
  std::unordered_set<std::string> seen;
  seen.reserve(spec.n_keys * 2);
  unsigned nw = words_for_bits(width);
  while (out.size() < spec.n_keys) {
    for (unsigned i = 0; i < nw; i++) s.w[i] = 0;
    if (spec.key_dist == KeyDist::kNormal) {
      // top eight bytes normal around the middle of the space, rest null
      s.w[0] = normal_u64(rng);
    } else {
      for (unsigned b = 0; b < spec.key_bytes; b++)
        s.w[b / 8] |= rng.below(256) << (56 - 8 * (b % 8));
    }
    if (width % kWordBits) s.w[nw - 1] &= last_word_mask(width);
    std::string fp(reinterpret_cast<const char*>(s.w.data()), nw * 8);
    if (seen.insert(fp).second) out.push_back(s.view(width));
  }
  out.sort();
  return out;
}

bool range_empty(const KeySet& keys, KeyView left, KeyView right) {
  size_t i = keys.lower_bound(left);
  return i == keys.size() || !kv_leq(keys[i], right);
}

namespace {

// Draws one query per the spec; deterministic given the rng state.
struct QueryGen {
  const WorkloadSpec& spec;
  const KeySet& keys;
  const KeySet* left_pool;

  RangeQuery draw(Rng& rng) const {
    unsigned width = spec.key_width_bits();
    QueryKind kind = spec.query_kind;
    bool from_split = kind == QueryKind::kSplit;
    if (from_split)
      kind = rng.bernoulli(0.5) ? QueryKind::kCorrelated : QueryKind::kUniform;
    uint64_t rmax = spec.rmax;
    if (from_split && kind == QueryKind::kUniform && spec.split_uniform_rmax > 0)
      rmax = spec.split_uniform_rmax;
    uint64_t offset =
        (rmax == 0 || kind == QueryKind::kPoint) ? 0 : rng.range(2, rmax);

    Key left(width);
    switch (kind) {
      case QueryKind::kPoint:
      case QueryKind::kUniform: {
        if (width == 64) {
          // left ~ U[0, 2^64 - rmax]; the extreme right bound saturates
          uint64_t v = rmax == 0 ? rng.next() : rng.below(uint64_t(0) - rmax + 1);
          left = Key::from_u64(v);
        } else {
          unsigned nw = words_for_bits(width);
          for (unsigned i = 0; i < nw; i++) left.words()[i] = rng.next();
          left.words()[nw - 1] &= last_word_mask(width);
        }
        break;
      }
      case QueryKind::kCorrelated: {
        KeyView anchor = keys[rng.below(keys.size())];
        left = Key(width, std::span<const Word>(anchor.w, anchor.nwords()));
        uint64_t dist = 1 + rng.below(std::max<uint64_t>(1, spec.corr_degree));
        kv_add_sat(left.words(), width, dist);
        break;
      }
      case QueryKind::kReal: {
        if (left_pool == nullptr || left_pool->empty())
          throw std::invalid_argument("real workload needs a left-bound pool");
        KeyView v = (*left_pool)[rng.below(left_pool->size())];
        left = Key(width, std::span<const Word>(v.w, v.nwords()));
        break;
      }
      case QueryKind::kSplit: break;  // resolved above
    }
    Key right = left;
    if (offset > 0) kv_add_sat(right.words(), width, offset);
    return {std::move(left), std::move(right)};
  }
};

}  // namespace

GeneratedQueries gen_queries(const WorkloadSpec& spec, const KeySet& keys,
                             const KeySet* left_pool) {
  if (keys.empty()) throw std::invalid_argument("gen_queries: no keys");
  if (spec.query_kind != QueryKind::kPoint && spec.rmax != 0 && spec.rmax < 2)
    throw std::invalid_argument("gen_queries: rmax must be 0 or >= 2");
  GeneratedQueries out;
  unsigned width = spec.key_width_bits();
  QueryGen gen{spec, keys, left_pool};

  Rng rng_eval(spec.seed ^ kEvalStream);
  out.eval = QuerySet(width);
  out.eval.reserve(spec.n_queries);
  out.empty.reserve(spec.n_queries);
  for (uint64_t i = 0; i < spec.n_queries; i++) {
    RangeQuery q = gen.draw(rng_eval);
    out.empty.push_back(range_empty(keys, q.left, q.right) ? 1 : 0);
    out.eval.push(q);
  }

  Rng rng_sample(spec.seed ^ kSampleStream);
  out.sample = QuerySet(width);
  out.sample.reserve(spec.n_sample);
  uint64_t attempts = 0, limit = spec.n_sample * 10000 + 1000000;
  while (out.sample.size() < spec.n_sample) {
    if (++attempts > limit)
      throw std::runtime_error("gen_queries: workload produces almost no empty queries");
    RangeQuery q = gen.draw(rng_sample);
    if (range_empty(keys, q.left, q.right)) out.sample.push(q);
  }
  return out;
}

QueryStream::QueryStream(const WorkloadSpec& spec, const KeySet& keys,
                         uint64_t seed)
    : spec_(spec), keys_(keys), rng_(seed) {}

RangeQuery QueryStream::next() {
  QueryGen gen{spec_, keys_, nullptr};
  return gen.draw(rng_);
}

RangeQuery QueryStream::next_empty() {
  QueryGen gen{spec_, keys_, nullptr};
  for (uint64_t attempts = 0; attempts < 10000000; attempts++) {
    RangeQuery q = gen.draw(rng_);
    if (range_empty(keys_, q.left, q.right)) return q;
  }
  throw std::runtime_error("query stream produces almost no empty queries");
}

// --- file formats -----------------------------------------------------------

KeySet load_sosd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open key file: " + path);
  uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 8);
  if (!in) throw FormatError("truncated header: " + path);
  std::vector<uint64_t> vals(count);
  in.read(reinterpret_cast<char*>(vals.data()), 8 * count);
  if (static_cast<uint64_t>(in.gcount()) != 8 * count)
    throw FormatError("count field exceeds payload: " + path);
  return KeySet::from_u64(vals);
}

void save_keys_u64(const std::string& path, const KeySet& keys) {
  if (keys.width() != 64)
    throw std::invalid_argument("save_keys_u64: integer keys only");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write key file: " + path);
  uint64_t count = keys.size();
  out.write(reinterpret_cast<const char*>(&count), 8);
  for (size_t i = 0; i < keys.size(); i++) {
    uint64_t v = keys.key(i).as_u64();
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
}

KeySet load_string_keys(const std::string& path, size_t pad_to) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open key file: " + path);
  KeySet out(static_cast<unsigned>(pad_to * 8));
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() > pad_to)
      throw FormatError("key longer than padded width in " + path);
    Key k = pad(line, pad_to);
    out.push_back(k);
  }
  return out;
}

void save_queries_text(const std::string& path, const QuerySet& queries) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write query file: " + path);
  for (size_t i = 0; i < queries.size(); i++) {
    QueryView q = queries[i];
    if (queries.width() == 64) {
      out << q.left.w[0] << "," << q.right.w[0] << "\n";
    } else {
      Key l(queries.width(), std::span<const Word>(q.left.w, q.left.nwords()));
      Key r(queries.width(), std::span<const Word>(q.right.w, q.right.nwords()));
      out << l.to_hex() << "," << r.to_hex() << "\n";
    }
  }
}

namespace {

Key parse_bound(const std::string& tok, unsigned width_bits) {
  if (width_bits == 64) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw FormatError("bad decimal bound: " + tok);
    return Key::from_u64(v);
  }
  if (tok.size() != (width_bits + 3) / 4)
    throw FormatError("bad hex bound width: " + tok);
  Key k(width_bits);
  for (size_t i = 0; i < tok.size(); i++) {
    char c = tok[i];
    unsigned nib;
    if (c >= '0' && c <= '9')
      nib = c - '0';
    else if (c >= 'a' && c <= 'f')
      nib = 10 + c - 'a';
    else if (c >= 'A' && c <= 'F')
      nib = 10 + c - 'A';
    else
      throw FormatError("bad hex digit in bound: " + tok);
    unsigned bit = static_cast<unsigned>(i) * 4;
    k.words()[bit / 64] |= Word(nib) << (60 - bit % 64);
  }
  return k;
}

}  // namespace

QuerySet load_queries_text(const std::string& path, unsigned width_bits) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open query file: " + path);
  QuerySet out(width_bits);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError("missing comma at line " + std::to_string(lineno));
    Key l = parse_bound(line.substr(0, comma), width_bits);
    Key r = parse_bound(line.substr(comma + 1), width_bits);
    if (kv_less(r, l))
      throw FormatError("reversed bounds at line " + std::to_string(lineno));
    out.push(l, r);
  }
  return out;
}

}  // namespace prf
