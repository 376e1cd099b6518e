// SPDX-License-Identifier: Apache-2.0
//
// Entropy coding of the two edit streams: the op-kind stream over
// {NoOp, Delete, Insert} and the insertion-content stream over the alphabet.
//
// The coder is a byte-oriented range coder with a 32-bit range and a 33-bit
// low register whose carries propagate into already-buffered 0xFF bytes.
// Symbols are coded against adaptive order-0 frequency tables.  The exact
// bit layout is documented in docs/FORMAT.md and is a compatibility promise.

#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indel/core.hpp"
#include "indel/error.hpp"

namespace indel {

struct BitStream {
  std::vector<std::uint8_t> bytes;
  std::size_t bit_length = 0;

  static BitStream from_bytes(std::vector<std::uint8_t> b) {
    BitStream s;
    s.bit_length = b.size() * 8;
    s.bytes = std::move(b);
    return s;
  }
  friend bool operator==(const BitStream&, const BitStream&) = default;
};

// ---------------------------------------------------------------------------
// Range coder

inline constexpr std::uint32_t kRangeTop = 1u << 24;
// Frequency totals stay at or below this so that range / total >= 2^8.
inline constexpr std::uint32_t kMaxTotal = 1u << 16;

class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    const std::uint32_t r = range_ / total;
    low_ += static_cast<std::uint64_t>(r) * cum;
    range_ = r * freq;
    while (range_ < kRangeTop) {
      range_ <<= 8;
      shift_low();
    }
  }

  // Terminates the stream with the shortest byte string that the decoder,
  // reading zeros past the end, maps back into the final interval.
  std::vector<std::uint8_t> finish() {
    // range >= 2^24 here, so rounding low up to a multiple of 2^24 stays
    // inside [low, low + range).
    low_ = (low_ + (kRangeTop - 1)) & ~static_cast<std::uint64_t>(kRangeTop - 1);
    for (int k = 0; k < 5; ++k) shift_low();
    // The first byte out of shift_low is the initial empty cache: always 0.
    out_.erase(out_.begin());
    while (!out_.empty() && out_.back() == 0) out_.pop_back();
    return std::move(out_);
  }

 private:
  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      const std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t temp = cache_;
      do {
        out_.push_back(static_cast<std::uint8_t>(temp + carry));
        temp = 0xFF;
      } while (--cache_size_ != 0);
      cache_ = static_cast<std::uint8_t>(static_cast<std::uint32_t>(low_) >> 24);
    }
    ++cache_size_;
    low_ = static_cast<std::uint64_t>(static_cast<std::uint32_t>(low_) << 8);
  }

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
    for (int k = 0; k < 4; ++k) code_ = (code_ << 8) | next();
  }

  // Returns the cumulative-frequency target; follow with consume().
  std::uint32_t target(std::uint32_t total) {
    r_ = range_ / total;
    const std::uint32_t v = code_ / r_;
    return std::min(v, total - 1);
  }

  void consume(std::uint32_t cum, std::uint32_t freq) {
    code_ -= r_ * cum;
    range_ = r_ * freq;
    while (range_ < kRangeTop) {
      code_ = (code_ << 8) | next();
      range_ <<= 8;
    }
  }

 private:
  std::uint32_t next() { return pos_ < in_.size() ? in_[pos_++] : 0u; }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t r_ = 1;
};

// ---------------------------------------------------------------------------
// Adaptive order-0 frequency model over K symbols.  Every count starts at 1;
// each coded symbol adds 1 to its count; when the total would exceed
// kMaxTotal all counts are halved (rounding up, so none reaches 0).  A
// Fenwick tree keeps cumulative lookups logarithmic for large alphabets.

class AdaptiveModel {
 public:
  explicit AdaptiveModel(std::uint32_t symbols)
      : k_(symbols), count_(symbols, 1), tree_(symbols + 1, 0), total_(symbols) {
    if (symbols == 0 || symbols > kMaxTotal / 2) {
      fail(ErrorCode::kDomainError, "adaptive model needs 1..32768 symbols");
    }
    rebuild();
  }

  std::uint32_t total() const { return total_; }
  std::uint32_t freq(std::uint32_t s) const { return count_[s]; }

  std::uint32_t cum(std::uint32_t s) const {  // sum of counts below s
    std::uint32_t sum = 0;
    for (std::uint32_t i = s; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  // Symbol whose cumulative interval contains target.
  std::uint32_t find(std::uint32_t target) const {
    std::uint32_t pos = 0;
    std::uint32_t step = 1;
    while (step * 2 <= k_) step *= 2;
    for (; step > 0; step >>= 1) {
      if (pos + step <= k_ && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return pos;
  }

  void update(std::uint32_t s) {
    ++count_[s];
    ++total_;
    for (std::uint32_t i = s + 1; i <= k_; i += i & (~i + 1)) ++tree_[i];
    if (total_ > kMaxTotal) {
      total_ = 0;
      for (auto& c : count_) {
        c = (c + 1) / 2;
        total_ += c;
      }
      rebuild();
    }
  }

 private:
  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0);
    for (std::uint32_t s = 0; s < k_; ++s) {
      for (std::uint32_t i = s + 1; i <= k_; i += i & (~i + 1)) tree_[i] += count_[s];
    }
  }

  std::uint32_t k_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> tree_;
  std::uint32_t total_;
};

// ---------------------------------------------------------------------------
// Stream framing helpers

namespace detail {

inline std::uint32_t crc_of(const std::vector<std::uint8_t>& data) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  std::size_t off = 0;
  while (off < data.size()) {
    const std::size_t chunk = std::min<std::size_t>(data.size() - off, 1u << 30);
    c = crc32(c, data.data() + off, static_cast<uInt>(chunk));
    off += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::vector<std::uint8_t> op_checksum_bytes(std::span<const OpKind> ops) {
  std::vector<std::uint8_t> b(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) b[i] = static_cast<std::uint8_t>(ops[i]);
  return b;
}

inline std::vector<std::uint8_t> content_checksum_bytes(std::span<const Symbol> s) {
  std::vector<std::uint8_t> b;
  b.reserve(2 * s.size());
  for (Symbol c : s) {
    b.push_back(static_cast<std::uint8_t>(c & 0xFF));
    b.push_back(static_cast<std::uint8_t>(c >> 8));
  }
  return b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Op stream: [range-coded kinds][CRC-32 of the kinds, one byte each, LE]

inline BitStream encode_ops(std::span<const OpKind> ops) {
  RangeEncoder enc;
  AdaptiveModel model(3);
  for (OpKind k : ops) {
    const auto s = static_cast<std::uint32_t>(k);
    enc.encode(model.cum(s), model.freq(s), model.total());
    model.update(s);
  }
  std::vector<std::uint8_t> out = enc.finish();
  detail::put_u32le(out, detail::crc_of(detail::op_checksum_bytes(ops)));
  return BitStream::from_bytes(std::move(out));
}

inline std::vector<OpKind> decode_ops(const BitStream& bits, std::size_t n_ops) {
  if (bits.bytes.size() < 4) fail(ErrorCode::kTruncatedStream, "op stream shorter than its checksum");
  const std::size_t body = bits.bytes.size() - 4;
  RangeDecoder dec(std::span<const std::uint8_t>(bits.bytes.data(), body));
  AdaptiveModel model(3);
  std::vector<OpKind> ops(n_ops);
  for (std::size_t i = 0; i < n_ops; ++i) {
    const std::uint32_t s = model.find(dec.target(model.total()));
    dec.consume(model.cum(s), model.freq(s));
    model.update(s);
    ops[i] = static_cast<OpKind>(s);
  }
  if (detail::crc_of(detail::op_checksum_bytes(ops)) != detail::get_u32le(bits.bytes.data() + body)) {
    fail(ErrorCode::kModelDesync, "op stream checksum mismatch");
  }
  return ops;
}

// ---------------------------------------------------------------------------
// Content stream: [mode byte][range-coded symbols][CRC-32 of the symbols as
// 16-bit little-endian values].  Mode 0 codes every symbol with the static
// uniform table (exactly log2 a bits per symbol up to rounding); mode 1 uses
// the adaptive table.  The encoder emits whichever is shorter, so uniform
// contents never pay the adaptive model's learning cost while repetitive
// contents still compress.

enum class ContentMode : std::uint8_t { kUniform = 0, kAdaptive = 1 };

// Largest alphabet for which the adaptive content mode is offered.
inline constexpr std::uint32_t kAdaptiveContentMaxAlphabet = 4096;

namespace detail {

inline std::vector<std::uint8_t> code_contents(std::span<const Symbol> symbols, std::uint32_t a,
                                               ContentMode mode) {
  RangeEncoder enc;
  if (mode == ContentMode::kUniform) {
    for (Symbol c : symbols) enc.encode(c, 1, a);
  } else {
    AdaptiveModel model(a);
    for (Symbol c : symbols) {
      enc.encode(model.cum(c), model.freq(c), model.total());
      model.update(c);
    }
  }
  return enc.finish();
}

}  // namespace detail

inline BitStream encode_contents(std::span<const Symbol> symbols, std::uint32_t a) {
  check_alphabet(a);
  for (Symbol c : symbols) {
    if (c >= a) fail(ErrorCode::kSymbolOutOfRange, "content symbol outside alphabet");
  }
  ContentMode mode = ContentMode::kUniform;
  std::vector<std::uint8_t> body = detail::code_contents(symbols, a, mode);
  if (a <= kAdaptiveContentMaxAlphabet && !symbols.empty()) {
    std::vector<std::uint8_t> adaptive = detail::code_contents(symbols, a, ContentMode::kAdaptive);
    if (adaptive.size() < body.size()) {
      body = std::move(adaptive);
      mode = ContentMode::kAdaptive;
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(body.size() + 5);
  out.push_back(static_cast<std::uint8_t>(mode));
  out.insert(out.end(), body.begin(), body.end());
  detail::put_u32le(out, detail::crc_of(detail::content_checksum_bytes(symbols)));
  return BitStream::from_bytes(std::move(out));
}

inline std::vector<Symbol> decode_contents(const BitStream& bits, std::size_t count,
                                           std::uint32_t a) {
  check_alphabet(a);
  if (bits.bytes.size() < 5) {
    fail(ErrorCode::kTruncatedStream, "content stream shorter than its mode byte and checksum");
  }
  const std::uint8_t mode = bits.bytes[0];
  if (mode > 1 || (mode == 1 && a > kAdaptiveContentMaxAlphabet)) {
    fail(ErrorCode::kModelDesync, "unknown content coding mode " + std::to_string(mode));
  }
  const std::size_t body = bits.bytes.size() - 5;
  RangeDecoder dec(std::span<const std::uint8_t>(bits.bytes.data() + 1, body));
  std::vector<Symbol> out(count);
  if (mode == 0) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t s = dec.target(a);
      dec.consume(s, 1);
      out[i] = static_cast<Symbol>(s);
    }
  } else {
    AdaptiveModel model(a);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t s = model.find(dec.target(model.total()));
      dec.consume(model.cum(s), model.freq(s));
      model.update(s);
      out[i] = static_cast<Symbol>(s);
    }
  }
  if (detail::crc_of(detail::content_checksum_bytes(out)) !=
      detail::get_u32le(bits.bytes.data() + 1 + body)) {
    fail(ErrorCode::kModelDesync, "content stream checksum mismatch");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical statistics of an op stream

struct OpStats {
  std::size_t n_ops = 0;
  std::size_t n_ins = 0;
  std::size_t n_del = 0;
  double p_noop = 0;
  double p_ins = 0;
  double p_del = 0;

  // Source length n = n_ops - n_ins and the normalized edit rates.
  std::size_t source_length() const { return n_ops - n_ins; }
  double eps_tilde() const { return source_length() ? double(n_ins) / double(source_length()) : 0; }
  double del_tilde() const { return source_length() ? double(n_del) / double(source_length()) : 0; }
};

// With eps~ = n_ins/n and del~ = n_del/n the empirical distribution is
// p_noop = (1-del~)/(1+eps~), p_ins = eps~/(1+eps~), p_del = del~/(1+eps~),
// i.e. plain frequencies over the n + n_ins ops.
inline OpStats op_stats(std::size_t n_ops, std::size_t n_ins, std::size_t n_del) {
  if (n_ins + n_del > n_ops) fail(ErrorCode::kDomainError, "op counts exceed stream length");
  OpStats s;
  s.n_ops = n_ops;
  s.n_ins = n_ins;
  s.n_del = n_del;
  if (n_ops > 0) {
    s.p_ins = double(n_ins) / double(n_ops);
    s.p_del = double(n_del) / double(n_ops);
    s.p_noop = double(n_ops - n_ins - n_del) / double(n_ops);
  }
  return s;
}

inline OpStats op_stats(std::span<const OpKind> ops) {
  std::size_t ins = 0, del = 0;
  for (OpKind k : ops) {
    if (k == OpKind::kInsert) ++ins;
    if (k == OpKind::kDelete) ++del;
  }
  return op_stats(ops.size(), ins, del);
}

namespace detail {
inline double plogp(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }
}  // namespace detail

// Ternary empirical entropy in bits per op.
inline double empirical_op_entropy(const OpStats& s) {
  return detail::plogp(s.p_noop) + detail::plogp(s.p_ins) + detail::plogp(s.p_del);
}

// The same quantity per source symbol: (1 + eps~) times the per-op value.
inline double empirical_op_entropy_per_source_symbol(const OpStats& s) {
  const std::size_t n = s.source_length();
  if (n == 0) return 0.0;
  return empirical_op_entropy(s) * double(s.n_ops) / double(n);
}

inline std::vector<OpKind> op_kinds(const EditPattern& e) {
  std::vector<OpKind> k(e.ops.size());
  for (std::size_t i = 0; i < e.ops.size(); ++i) k[i] = e.ops[i].kind;
  return k;
}

inline std::vector<Symbol> insertion_contents(const EditPattern& e) {
  std::vector<Symbol> c;
  c.reserve(e.k_ins);
  for (const EditOp& op : e.ops) {
    if (op.kind == OpKind::kInsert) c.push_back(op.content);
  }
  return c;
}

}  // namespace indel
