// SPDX-License-Identifier: Apache-2.0
//
// Seeded generators for both edit models, the counting constructions, and
// the on-disk corpus format.
//
// Randomness comes from SplitMix64 (Steele, Lea & Flood, 2014): output i of a
// stream is a fixed bijective mix of seed + (i+1)*0x9E3779B97F4A7C15, so the
// same (params, seed) produce the same corpus on any platform.  Bounded
// integers use Lemire's multiply-shift with rejection; unit doubles take the
// top 53 bits.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "indel/core.hpp"
#include "indel/error.hpp"
#include "json.hpp"

namespace indel {

class SplitMix64 {
 public:
  // Independent streams for the same seed are selected with `stream`.
  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(seed ^ (stream * 0xD1B54A32D192ED03ull)) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    __uint128_t m = static_cast<__uint128_t>(next()) * bound;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<__uint128_t>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Stream tags keep the generators of one seed independent of each other.
enum class RngStream : std::uint64_t { kSource = 1, kLtrrid = 2, kApes = 3, kLab = 4 };

// ---------------------------------------------------------------------------

struct RpesParams {
  std::size_t n = 0;
  std::uint32_t a = kByteAlphabet;
  double eps = 0;
  double del = 0;
  std::uint64_t seed = 0;
};

enum class ApesPolicy { kUniformRandom, kWorstCaseLB };

struct ApesParams {
  std::size_t n = 0;
  std::uint32_t a = kByteAlphabet;
  std::size_t max_ins = 0;
  std::size_t max_del = 0;
  ApesPolicy policy = ApesPolicy::kUniformRandom;
  std::uint64_t seed = 0;

  static ApesParams from_rates(std::size_t n, std::uint32_t a, double eps, double del,
                               ApesPolicy policy, std::uint64_t seed) {
    ApesParams p;
    p.n = n;
    p.a = a;
    p.max_ins = static_cast<std::size_t>(eps * static_cast<double>(n));
    p.max_del = static_cast<std::size_t>(del * static_cast<double>(n));
    p.policy = policy;
    p.seed = seed;
    return p;
  }
};

inline Sequence gen_pre_ess(std::size_t n, std::uint32_t a, std::uint64_t seed) {
  check_alphabet(a);
  SplitMix64 rng(seed, static_cast<std::uint64_t>(RngStream::kSource));
  Sequence x;
  x.alphabet = a;
  x.symbols.resize(n);
  for (auto& c : x.symbols) c = static_cast<Symbol>(rng.below(a));
  return x;
}

// The left-to-right random InDel automaton.  Before each symbol (and once
// more in front of end-of-file) the cursor draws: insert a uniform symbol
// with probability eps (cursor stays), delete with probability del, keep
// otherwise.  At end-of-file any non-insert draw stops the process, so
// K_I ~ NB(n+1; eps) and K_D ~ B(n, del/(1-eps)).
inline std::pair<EditPattern, Sequence> gen_ltrrid(const Sequence& x, const RpesParams& p) {
  if (x.size() != p.n) fail(ErrorCode::kDomainError, "source length differs from params.n");
  // eps < 1 keeps the expected number of draws finite; del = 1 - eps is
  // allowed and deletes every source symbol.
  if (p.eps < 0 || p.del < 0 || p.eps >= 1.0 || p.eps + p.del > 1.0) {
    fail(ErrorCode::kDomainError, "need 0 <= eps < 1, del >= 0 and eps + del <= 1");
  }
  SplitMix64 rng(p.seed, static_cast<std::uint64_t>(RngStream::kLtrrid));
  EditPattern e;
  e.ops.reserve(x.size() + x.size() / 8 + 4);
  Sequence y;
  y.alphabet = x.alphabet;
  y.symbols.reserve(x.size());
  std::size_t i = 0;
  for (;;) {
    const double u = rng.unit();
    if (u < p.eps) {
      const auto c = static_cast<Symbol>(rng.below(x.alphabet));
      e.push(EditOp::ins(c));
      y.symbols.push_back(c);
      continue;
    }
    if (i == x.size()) break;
    if (u < p.eps + p.del) {
      e.push(EditOp::del());
    } else {
      e.push(EditOp::noop());
      y.symbols.push_back(x[i]);
    }
    ++i;
  }
  return {std::move(e), std::move(y)};
}

// Alternating 0101... source required by the worst-case construction.
inline bool is_alternating(const Sequence& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != (i % 2)) return false;
  }
  return true;
}

inline std::pair<std::vector<ArbitraryEdit>, Sequence> gen_apes(const Sequence& x,
                                                               const ApesParams& p) {
  if (x.size() != p.n) fail(ErrorCode::kDomainError, "source length differs from params.n");
  SplitMix64 rng(p.seed, static_cast<std::uint64_t>(RngStream::kApes));

  if (p.policy == ApesPolicy::kUniformRandom) {
    const std::size_t k_ins = rng.below(p.max_ins + 1);
    const std::size_t k_del = rng.below(p.max_del + 1);
    // Random interleaving of the operation kinds.
    std::vector<bool> is_ins(k_ins + k_del, false);
    std::fill(is_ins.begin(), is_ins.begin() + static_cast<std::ptrdiff_t>(k_ins), true);
    for (std::size_t t = is_ins.size(); t > 1; --t) {
      const std::size_t u = rng.below(t);
      const bool tmp = is_ins[t - 1];
      is_ins[t - 1] = is_ins[u];
      is_ins[u] = tmp;
    }
    std::vector<ArbitraryEdit> raw;
    std::size_t len = x.size();
    for (bool ins : is_ins) {
      if (ins) {
        raw.push_back(ArbitraryEdit::ins(rng.below(len + 1), static_cast<Symbol>(rng.below(x.alphabet))));
        ++len;
      } else if (len > 0) {
        raw.push_back(ArbitraryEdit::del(1 + rng.below(len)));
        --len;
      }
    }
    const CanonicalEdits canon = canonicalize_arbitrary(x, raw);
    std::vector<ArbitraryEdit> edits = to_arbitrary_edits(canon);
    Sequence y = apply_canonical(x, canon);
    return {std::move(edits), std::move(y)};
  }

  // Worst-case construction: exactly max_del pairwise non-adjacent deletions
  // left to right, then exactly max_ins insertions of symbols from
  // {2, ..., a-1} left to right at uniformly chosen output positions.
  if (x.alphabet < 3 || !is_alternating(x)) {
    fail(ErrorCode::kPolicyPreconditionViolated,
         "worst-case policy needs the alternating source and an alphabet of at least 3");
  }
  const std::size_t n = x.size();
  const std::size_t kd = p.max_del;
  if (kd > 0 && (kd > n || n - kd + 1 < kd)) {
    fail(ErrorCode::kPolicyPreconditionViolated, "too many deletions to keep them non-adjacent");
  }
  // Uniform k-subset of {0..n-k} mapped to a non-adjacent subset of {0..n-1}.
  auto sample_subset = [&rng](std::size_t universe, std::size_t k) {
    std::vector<std::size_t> chosen;  // Floyd's algorithm
    for (std::size_t j = universe - k; j < universe; ++j) {
      const std::size_t t = rng.below(j + 1);
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
        chosen.push_back(t);
      } else {
        chosen.push_back(j);
      }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  };
  CanonicalEdits canon;
  if (kd > 0) {
    std::vector<std::size_t> s = sample_subset(n - kd + 1, kd);
    for (std::size_t t = 0; t < kd; ++t) canon.deletions.push_back(s[t] + t);
  }
  const std::size_t out_len = n - kd + p.max_ins;
  if (p.max_ins > 0) {
    for (std::size_t pos : sample_subset(out_len, p.max_ins)) {
      canon.insertions.push_back({pos, static_cast<Symbol>(2 + rng.below(x.alphabet - 2))});
    }
  }
  std::vector<ArbitraryEdit> edits = to_arbitrary_edits(canon);
  Sequence y = apply_canonical(x, canon);
  return {std::move(edits), std::move(y)};
}

// ---------------------------------------------------------------------------

enum class ConstructionKind { kAllSame, kAllDistinct, kAlternating };

struct Construction {
  ConstructionKind kind = ConstructionKind::kAllSame;
  Symbol alpha = 0;  // symbol for kAllSame

  static Construction all_same(Symbol a) { return {ConstructionKind::kAllSame, a}; }
  static Construction all_distinct() { return {ConstructionKind::kAllDistinct, 0}; }
  static Construction alternating() { return {ConstructionKind::kAlternating, 0}; }
};

inline Sequence make_construction(const Construction& c, std::size_t n, std::uint32_t a) {
  check_alphabet(a);
  Sequence s;
  s.alphabet = a;
  s.symbols.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (c.kind) {
      case ConstructionKind::kAllSame: s.symbols[i] = c.alpha; break;
      case ConstructionKind::kAllDistinct: s.symbols[i] = static_cast<Symbol>(i % a); break;
      case ConstructionKind::kAlternating: s.symbols[i] = static_cast<Symbol>(i % 2); break;
    }
  }
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Corpus pair files.
//
//   "IDCP" | version u8 = 1 | a-1 u16 LE | width u8 (1 or 2 bytes/symbol)
//   | len(x) u64 LE | x | len(y) u64 LE | y | len(meta) u32 LE | meta (JSON)
//
// Each pair file <name>.bin has a sidecar <name>.json holding the same
// metadata (model, parameters, seed) for tooling that never opens the binary.

struct CorpusPair {
  Sequence x;
  Sequence y;
  nlohmann::json meta;
};

namespace detail {

inline void write_le(std::ofstream& out, std::uint64_t v, int bytes) {
  for (int k = 0; k < bytes; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xFF));
}

inline std::uint64_t read_le(std::ifstream& in, int bytes) {
  std::uint64_t v = 0;
  for (int k = 0; k < bytes; ++k) {
    const int c = in.get();
    if (c == EOF) fail(ErrorCode::kTruncatedStream, "corpus file ends early");
    v |= static_cast<std::uint64_t>(c) << (8 * k);
  }
  return v;
}

}  // namespace detail

inline void write_corpus_pair(const std::filesystem::path& dir, const std::string& name,
                              const CorpusPair& pair) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path bin = dir / (name + ".bin");
  std::ofstream out(bin, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + bin.string());
  const int width = pair.x.alphabet <= 256 ? 1 : 2;
  out.write("IDCP", 4);
  out.put(1);
  detail::write_le(out, pair.x.alphabet - 1, 2);
  out.put(static_cast<char>(width));
  for (const Sequence* s : {&pair.x, &pair.y}) {
    detail::write_le(out, s->size(), 8);
    for (Symbol c : s->symbols) detail::write_le(out, c, width);
  }
  const std::string meta = pair.meta.dump();
  detail::write_le(out, meta.size(), 4);
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + bin.string());

  const std::filesystem::path side = dir / (name + ".json");
  std::ofstream js(side);
  js << pair.meta.dump(2) << "\n";
  if (!js) fail(ErrorCode::kIo, "cannot write " + side.string());
}

inline CorpusPair read_corpus_pair(const std::filesystem::path& bin) {
  std::ifstream in(bin, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + bin.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "IDCP") fail(ErrorCode::kBadMagic, bin.string() + " is not a corpus pair");
  if (in.get() != 1) fail(ErrorCode::kVersionUnsupported, "corpus pair version");
  const auto a = static_cast<std::uint32_t>(detail::read_le(in, 2) + 1);
  const int width = in.get();
  if (width != 1 && width != 2) fail(ErrorCode::kMalformed, "corpus symbol width");
  CorpusPair pair;
  for (Sequence* s : {&pair.x, &pair.y}) {
    s->alphabet = a;
    const std::uint64_t len = detail::read_le(in, 8);
    s->symbols.resize(len);
    for (auto& c : s->symbols) c = static_cast<Symbol>(detail::read_le(in, width));
    validate(*s);
  }
  const std::uint64_t meta_len = detail::read_le(in, 4);
  std::string meta(meta_len, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(meta_len));
  if (!in) fail(ErrorCode::kTruncatedStream, "corpus metadata ends early");
  pair.meta = nlohmann::json::parse(meta);
  return pair;
}

enum class CorpusModel { kRpes, kApes };

// One generated (X, Y) pair with its metadata: model, parameters, seed and
// the realised edit counts.
inline CorpusPair generate_corpus_pair(CorpusModel model, std::size_t n, std::uint32_t a, double eps,
                                       double del, std::uint64_t seed,
                                       ApesPolicy policy = ApesPolicy::kUniformRandom) {
  CorpusPair pair;
  std::size_t k_ins = 0, k_del = 0;
  if (model == CorpusModel::kRpes) {
    pair.x = gen_pre_ess(n, a, seed);
    auto [e, y] = gen_ltrrid(pair.x, RpesParams{n, a, eps, del, seed});
    k_ins = e.k_ins;
    k_del = e.k_del;
    pair.y = std::move(y);
  } else {
    pair.x = policy == ApesPolicy::kWorstCaseLB ? make_construction(Construction::alternating(), n, a)
                                                : gen_pre_ess(n, a, seed);
    auto [edits, y] = gen_apes(pair.x, ApesParams::from_rates(n, a, eps, del, policy, seed));
    for (const ArbitraryEdit& ed : edits) (ed.op == ArbitraryOp::kInsert ? k_ins : k_del) += 1;
    pair.y = std::move(y);
  }
  pair.meta = {{"model", model == CorpusModel::kRpes ? "rpes" : "apes"},
               {"n", n},
               {"a", a},
               {"eps", eps},
               {"del", del},
               {"seed", seed},
               {"k_ins", k_ins},
               {"k_del", k_del}};
  if (model == CorpusModel::kApes) {
    pair.meta["policy"] = policy == ApesPolicy::kWorstCaseLB ? "worst-case" : "uniform";
  }
  return pair;
}

}  // namespace indel
