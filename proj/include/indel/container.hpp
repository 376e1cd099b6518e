// SPDX-License-Identifier: Apache-2.0
//
// End-to-end file update codec: Enc(X, Y) = entropy-code(represent(DP(X, Y))).
// The transmission is a self-delimiting byte container (layout in
// docs/FORMAT.md): a fixed little-endian header with varint counts, the op
// stream, the content stream, and a 64-bit FNV-1a digest of Y that lets the
// decoder refuse to emit a wrong Y.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "indel/core.hpp"
#include "indel/edit_dp.hpp"
#include "indel/entropy.hpp"
#include "indel/error.hpp"

namespace indel {

inline constexpr std::uint8_t kContainerMagic[4] = {'I', 'D', 'U', '1'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::uint8_t kCoderAdaptiveRange = 1;

// ---------------------------------------------------------------------------
// Digest: FNV-1a (64-bit) over the symbols, one byte each when a <= 256 and
// two little-endian bytes each otherwise.  For a = 256 this is exactly the
// FNV-1a hash of the file bytes.

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t sequence_digest(const Sequence& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  if (s.alphabet <= 256) {
    for (Symbol c : s.symbols) mix(static_cast<std::uint8_t>(c));
  } else {
    for (Symbol c : s.symbols) {
      mix(static_cast<std::uint8_t>(c & 0xFF));
      mix(static_cast<std::uint8_t>(c >> 8));
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Varints (unsigned LEB128)

namespace detail {

inline void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16le() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint64_t u64le() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | in_[pos_ + static_cast<std::size_t>(k)];
    pos_ += 8;
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8();
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
    }
    fail(ErrorCode::kMalformed, "varint longer than 64 bits");
  }
  std::vector<std::uint8_t> bytes(std::uint64_t len) {
    need(len);
    std::vector<std::uint8_t> b(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return b;
  }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::uint64_t k) const {
    if (k > in_.size() - pos_) fail(ErrorCode::kTruncatedStream, "container ends early");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------

struct TransmissionHeader {
  std::uint8_t version = kContainerVersion;
  std::uint32_t alphabet = kByteAlphabet;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t k_ins = 0;
  std::uint64_t k_del = 0;
  std::uint8_t coder = kCoderAdaptiveRange;
  friend bool operator==(const TransmissionHeader&, const TransmissionHeader&) = default;
};

struct Transmission {
  TransmissionHeader header;
  BitStream op_bits;
  BitStream content_bits;
  std::uint64_t y_digest = 0;
  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct RateReport {
  std::uint64_t n = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t header_bits = 0;
  std::uint64_t op_bits = 0;
  std::uint64_t content_bits = 0;
  std::uint64_t digest_bits = 0;
  double bits_per_source_symbol = 0;
};

namespace detail {

inline std::vector<std::uint8_t> header_bytes(const TransmissionHeader& h) {
  std::vector<std::uint8_t> out(kContainerMagic, kContainerMagic + 4);
  out.push_back(h.version);
  out.push_back(h.coder);
  const std::uint32_t a1 = h.alphabet - 1;
  out.push_back(static_cast<std::uint8_t>(a1 & 0xFF));
  out.push_back(static_cast<std::uint8_t>(a1 >> 8));
  put_varint(out, h.n);
  put_varint(out, h.m);
  put_varint(out, h.k_ins);
  put_varint(out, h.k_del);
  return out;
}

inline std::size_t varint_size(std::uint64_t v) {
  std::size_t s = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++s;
  }
  return s;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const Transmission& t) {
  std::vector<std::uint8_t> out = detail::header_bytes(t.header);
  detail::put_varint(out, t.op_bits.bytes.size());
  out.insert(out.end(), t.op_bits.bytes.begin(), t.op_bits.bytes.end());
  detail::put_varint(out, t.content_bits.bytes.size());
  out.insert(out.end(), t.content_bits.bytes.begin(), t.content_bits.bytes.end());
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(t.y_digest >> (8 * k)));
  return out;
}

inline Transmission parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) fail(ErrorCode::kTruncatedStream, "container shorter than its magic");
  for (int k = 0; k < 4; ++k) {
    if (bytes[static_cast<std::size_t>(k)] != kContainerMagic[k]) {
      fail(ErrorCode::kBadMagic, "not an update container");
    }
  }
  detail::Reader r(bytes.subspan(4));
  Transmission t;
  t.header.version = r.u8();
  if (t.header.version != kContainerVersion) {
    fail(ErrorCode::kVersionUnsupported,
         "container version " + std::to_string(t.header.version) + " not supported");
  }
  t.header.coder = r.u8();
  if (t.header.coder != kCoderAdaptiveRange) {
    fail(ErrorCode::kVersionUnsupported, "coder id " + std::to_string(t.header.coder) + " not supported");
  }
  t.header.alphabet = static_cast<std::uint32_t>(r.u16le()) + 1;
  if (t.header.alphabet < kMinAlphabet) fail(ErrorCode::kMalformed, "alphabet size below 2");
  t.header.n = r.varint();
  t.header.m = r.varint();
  t.header.k_ins = r.varint();
  t.header.k_del = r.varint();
  if (t.header.k_del > t.header.n || t.header.n - t.header.k_del + t.header.k_ins != t.header.m) {
    fail(ErrorCode::kMalformed, "edit counts inconsistent with lengths");
  }
  t.op_bits = BitStream::from_bytes(r.bytes(r.varint()));
  t.content_bits = BitStream::from_bytes(r.bytes(r.varint()));
  t.y_digest = r.u64le();
  if (r.remaining() != 0) fail(ErrorCode::kMalformed, "trailing bytes after digest");
  return t;
}

enum class DpVariant { kBanded, kFull };

inline Transmission encode_update(const Sequence& x, const Sequence& y,
                                  DpVariant variant = DpVariant::kBanded) {
  if (x.alphabet != y.alphabet) {
    fail(ErrorCode::kAlphabetMismatch, "old and new sequences use different alphabets");
  }
  validate(x);
  validate(y);
  const DpResult dp = variant == DpVariant::kFull ? edit_distance_full(x, y) : edit_distance_banded(x, y);
  Transmission t;
  t.header.alphabet = x.alphabet;
  t.header.n = x.size();
  t.header.m = y.size();
  t.header.k_ins = dp.k_ins;
  t.header.k_del = dp.k_del;
  const std::vector<OpKind> kinds = op_kinds(dp.script);
  const std::vector<Symbol> contents = insertion_contents(dp.script);
  t.op_bits = encode_ops(kinds);
  t.content_bits = encode_contents(contents, x.alphabet);
  t.y_digest = sequence_digest(y);
  return t;
}

// Any inconsistency in a complete payload (checksum failure, wrong op counts,
// a pattern that does not fit X, or a digest mismatch) is reported as
// DigestMismatch: the decoder never returns a Y it cannot vouch for.  Streams
// too short to hold their own checksum stay TruncatedStream.
inline Sequence decode_update(const Sequence& x, const Transmission& t) {
  if (t.header.version != kContainerVersion) {
    fail(ErrorCode::kVersionUnsupported, "container version not supported");
  }
  if (x.alphabet != t.header.alphabet) {
    fail(ErrorCode::kAlphabetMismatch, "old sequence alphabet " + std::to_string(x.alphabet) +
                                           " differs from container alphabet " +
                                           std::to_string(t.header.alphabet));
  }
  if (x.size() != t.header.n) {
    fail(ErrorCode::kDigestMismatch, "old sequence has length " + std::to_string(x.size()) +
                                         " but the update was made against length " +
                                         std::to_string(t.header.n));
  }
  const std::size_t n_ops = static_cast<std::size_t>(t.header.n + t.header.k_ins);
  Sequence y;
  try {
    const std::vector<OpKind> kinds = decode_ops(t.op_bits, n_ops);
    const std::vector<Symbol> contents =
        decode_contents(t.content_bits, static_cast<std::size_t>(t.header.k_ins), t.header.alphabet);
    EditPattern e;
    e.ops.reserve(n_ops);
    std::size_t c = 0;
    for (OpKind k : kinds) {
      if (k == OpKind::kInsert) {
        if (c >= contents.size()) fail(ErrorCode::kModelDesync, "more insertions than contents");
        e.push(EditOp::ins(contents[c++]));
      } else {
        e.push({k, 0});
      }
    }
    if (e.k_ins != t.header.k_ins || e.k_del != t.header.k_del) {
      fail(ErrorCode::kModelDesync, "decoded op counts disagree with header");
    }
    y = apply_edit_pattern(x, e);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kTruncatedStream) throw;
    fail(ErrorCode::kDigestMismatch, std::string("payload failed verification (") + err.what() + ")");
  }
  if (sequence_digest(y) != t.y_digest) {
    fail(ErrorCode::kDigestMismatch, "reconstructed sequence does not match the digest of the new file");
  }
  return y;
}

inline RateReport measure_rate(const Transmission& t) {
  RateReport r;
  r.n = t.header.n;
  r.header_bits = 8 * (detail::header_bytes(t.header).size() +
                       detail::varint_size(t.op_bits.bytes.size()) +
                       detail::varint_size(t.content_bits.bytes.size()));
  r.op_bits = 8 * t.op_bits.bytes.size();
  r.content_bits = 8 * t.content_bits.bytes.size();
  r.digest_bits = 64;
  r.total_bits = r.header_bits + r.op_bits + r.content_bits + r.digest_bits;
  r.bits_per_source_symbol = double(r.total_bits) / double(r.n > 0 ? r.n : 1);
  return r;
}

}  // namespace indel
