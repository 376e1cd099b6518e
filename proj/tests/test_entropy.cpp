// SPDX-License-Identifier: Apache-2.0
//
// Range coder, op stream, content stream and empirical entropy.

#include <gtest/gtest.h>

#include <cmath>

#include "indel/entropy.hpp"
#include "indel/sim.hpp"

using namespace indel;

namespace {

constexpr std::size_t kChecksumBits = 32;

std::vector<OpKind> random_ops(std::size_t n_ops, double p_ins, double p_del, std::uint64_t seed) {
  SplitMix64 rng(seed, 21);
  std::vector<OpKind> ops(n_ops, OpKind::kNoOp);
  for (auto& k : ops) {
    const double u = rng.unit();
    if (u < p_ins) k = OpKind::kInsert;
    else if (u < p_ins + p_del) k = OpKind::kDelete;
  }
  return ops;
}

double entropy_bits(const std::vector<OpKind>& ops) {
  return empirical_op_entropy(op_stats(ops)) * static_cast<double>(ops.size());
}

}  // namespace

TEST(OpStream, AllNoOpsCostAlmostNothing) {
  const std::vector<OpKind> ops(1000, OpKind::kNoOp);
  const BitStream b = encode_ops(ops);
  EXPECT_LE(b.bit_length, 64u + 20u);
  EXPECT_EQ(decode_ops(b, 1000), ops);
}

TEST(OpStream, EmptyStream) {
  const BitStream b = encode_ops({});
  EXPECT_TRUE(decode_ops(b, 0).empty());
}

TEST(OpStream, LengthNearEmpiricalEntropy) {
  const double p = 0.01 / 1.01;
  const auto ops = random_ops(100000, p, p, 4);
  const BitStream b = encode_ops(ops);
  const double h = entropy_bits(ops);
  // Reference value from the two binary entropies at the same rates.
  const double reference = 2 * (-p * std::log2(p) - (1 - p) * std::log2(1 - p)) * 1e5;
  EXPECT_NEAR(h, reference, 0.05 * reference);
  EXPECT_LE(double(b.bit_length - kChecksumBits), h * 1.02 + 64);
  EXPECT_EQ(decode_ops(b, ops.size()), ops);
}

TEST(OpStream, TenThousandOpStreamsWithinOverhead) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double rate = 0.005 * static_cast<double>(1 + seed % 10);
    const auto ops = random_ops(10000, rate, rate, seed);
    const BitStream b = encode_ops(ops);
    EXPECT_LE(double(b.bit_length - kChecksumBits), entropy_bits(ops) * 1.02 + 64) << "seed " << seed;
  }
}

TEST(OpStream, RandomTernaryRoundTrips) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    SplitMix64 rng(seed, 22);
    const auto ops = random_ops(rng.below(300), rng.unit() / 2, rng.unit() / 2, seed);
    ASSERT_EQ(decode_ops(encode_ops(ops), ops.size()), ops);
  }
}

TEST(OpStream, CorruptionIsDetected) {
  const auto ops = random_ops(5000, 0.05, 0.05, 1);
  BitStream b = encode_ops(ops);
  for (std::size_t byte = 0; byte < b.bytes.size(); byte += 7) {
    BitStream bad = b;
    bad.bytes[byte] ^= 0x10;
    EXPECT_THROW(decode_ops(bad, ops.size()), Error);
  }
}

TEST(OpStream, TruncatedStream) {
  try {
    decode_ops(BitStream::from_bytes({1, 2}), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedStream);
  }
}

TEST(ContentStream, EmptyContentIsHeaderOnly) {
  const BitStream b = encode_contents({}, 256);
  EXPECT_LE(b.bytes.size(), 5u + 5u);
  EXPECT_TRUE(decode_contents(b, 0, 256).empty());
}

TEST(ContentStream, UniformBytesCostAboutEightBitsEach) {
  const Sequence s = gen_pre_ess(1000, 256, 7);
  const BitStream b = encode_contents(s.symbols, 256);
  EXPECT_GE(b.bit_length, 8000u);
  EXPECT_LE(b.bit_length, 8000u + 128u);
  EXPECT_EQ(decode_contents(b, 1000, 256), s.symbols);
}

TEST(ContentStream, ConstantSymbolsCompress) {
  const std::vector<Symbol> s(1000, 42);
  const BitStream b = encode_contents(s, 256);
  EXPECT_LT(b.bit_length, 1500u);
  EXPECT_EQ(decode_contents(b, 1000, 256), s);
}

TEST(ContentStream, LargeAlphabetsRoundTrip) {
  for (std::uint32_t a : {2u, 3u, 4096u, 4097u, 65536u}) {
    const Sequence s = gen_pre_ess(2000, a, a);
    EXPECT_EQ(decode_contents(encode_contents(s.symbols, a), s.size(), a), s.symbols) << a;
  }
}

TEST(ContentStream, RejectsSymbolOutsideAlphabet) {
  const std::vector<Symbol> s{0, 4};
  try {
    encode_contents(s, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSymbolOutOfRange);
  }
}

TEST(ContentStream, WrongCountIsDetected) {
  const Sequence s = gen_pre_ess(100, 16, 3);
  const BitStream b = encode_contents(s.symbols, 16);
  EXPECT_THROW(decode_contents(b, 99, 16), Error);
}

TEST(Entropy, ZeroRatesGiveZero) {
  EXPECT_EQ(empirical_op_entropy(op_stats(100, 0, 0)), 0.0);
}

TEST(Entropy, UniformTernary) {
  EXPECT_NEAR(empirical_op_entropy(op_stats(3, 1, 1)), std::log2(3.0), 1e-12);
}

TEST(Entropy, DeletionOnlyPerSourceSymbol) {
  const OpStats s = op_stats(1000, 0, 500);
  EXPECT_NEAR(s.del_tilde(), 0.5, 1e-12);
  EXPECT_NEAR(empirical_op_entropy_per_source_symbol(s), 1.0, 1e-12);
}

TEST(Entropy, StatsFromRates) {
  // eps~ = del~ = 0.01 over n = 10^4 source symbols.
  const OpStats s = op_stats(10100, 100, 100);
  EXPECT_NEAR(s.p_ins, 0.01 / 1.01, 1e-12);
  EXPECT_NEAR(s.p_noop, 0.99 / 1.01, 1e-12);
  EXPECT_NEAR(s.eps_tilde(), 0.01, 1e-12);
  EXPECT_THROW(op_stats(10, 6, 6), Error);
}
