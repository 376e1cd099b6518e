// SPDX-License-Identifier: Apache-2.0
//
// Sequences, runs, edit patterns and the deletion-first canonical form.

#include <gtest/gtest.h>

#include <functional>

#include "indel/core.hpp"
#include "indel/sim.hpp"

using namespace indel;

namespace {

EditPattern pattern(std::initializer_list<EditOp> ops) { return EditPattern(std::vector<EditOp>(ops)); }

const EditOp N = EditOp::noop();
const EditOp D = EditOp::del();

}  // namespace

TEST(Alphabet, RejectsSizesOutsideTwoTo65536) {
  EXPECT_NO_THROW(check_alphabet(2));
  EXPECT_NO_THROW(check_alphabet(65536));
  EXPECT_THROW(check_alphabet(1), Error);
  EXPECT_THROW(check_alphabet(65537), Error);
}

TEST(Sequence, ValidateFlagsOutOfRangeSymbols) {
  Sequence s(3, {0, 1, 3});
  try {
    validate(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSymbolOutOfRange);
  }
  EXPECT_NO_THROW(validate(Sequence(3, {})));
}

TEST(Runs, SingleRun) {
  const auto d = run_decompose(from_digits("000", 2));
  ASSERT_EQ(d.runs.size(), 1u);
  EXPECT_EQ(d.runs[0].symbol, 0);
  EXPECT_EQ(d.runs[0].length, 3u);
}

TEST(Runs, Alternating) {
  const auto d = run_decompose(from_digits("0101", 2));
  ASSERT_EQ(d.runs.size(), 4u);
  for (const indel::Run& r : d.runs) EXPECT_EQ(r.length, 1u);
}

TEST(Runs, ThirteenSymbolExampleHasSixRuns) {
  const auto d = run_decompose(from_digits("0001111223233", 4));
  ASSERT_EQ(d.runs.size(), 6u);
  const std::vector<std::size_t> lengths{3, 4, 2, 1, 1, 2};
  const std::vector<Symbol> symbols{0, 1, 2, 3, 2, 3};
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(d.runs[r].length, lengths[r]);
    EXPECT_EQ(d.runs[r].symbol, symbols[r]);
  }
}

TEST(Runs, EmptySequenceHasNoRuns) { EXPECT_TRUE(run_decompose(Sequence(2, {})).runs.empty()); }

TEST(Runs, ConcatenateInvertsDecomposition) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Sequence x = gen_pre_ess(seed % 30, 3, seed);
    EXPECT_EQ(concatenate(run_decompose(x), 3), x);
    const auto idx = run_index(x);
    for (std::size_t i = 1; i < x.size(); ++i) EXPECT_EQ(idx[i] - idx[i - 1], x[i] != x[i - 1] ? 1u : 0u);
  }
}

TEST(ApplyPattern, TwoLeadingDeletions) {
  const Sequence y = apply_edit_pattern(from_digits("00000", 2), pattern({D, D, N, N, N}));
  EXPECT_EQ(to_digits(y), "000");
}

TEST(ApplyPattern, IdentityPattern) {
  const Sequence x = from_digits("0120", 3);
  EXPECT_EQ(apply_edit_pattern(x, identity_pattern(4)), x);
}

TEST(ApplyPattern, DeletesSecondAndFifthSymbols) {
  const Sequence y = apply_edit_pattern(from_digits("0111223", 4), pattern({N, D, N, N, D, N, N}));
  EXPECT_EQ(to_digits(y), "01123");
}

TEST(ApplyPattern, InsertionsEmitWithoutConsuming) {
  const Sequence y = apply_edit_pattern(from_digits("01", 3), pattern({EditOp::ins(2), N, EditOp::ins(2), N, EditOp::ins(0)}));
  EXPECT_EQ(to_digits(y), "20210");
}

TEST(ApplyPattern, LengthMismatchIsReported) {
  try {
    apply_edit_pattern(from_digits("000", 2), pattern({N, N}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPatternLengthMismatch);
  }
}

TEST(ApplyPattern, LengthLawOnRandomPatterns) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const Sequence x = gen_pre_ess(seed % 50, 4, seed);
    const auto [e, y] = gen_ltrrid(x, RpesParams{x.size(), 4, 0.1, 0.1, seed});
    EXPECT_EQ(y.size(), x.size() - e.k_del + e.k_ins);
    EXPECT_EQ(apply_edit_pattern(x, e), y);
  }
}

TEST(Canonicalize, SelfCancellingPairVanishes) {
  const Sequence x = from_digits("0101", 3);
  const auto c = canonicalize_arbitrary(x, {ArbitraryEdit::ins(2, 2), ArbitraryEdit::del(3)});
  EXPECT_TRUE(c.deletions.empty());
  EXPECT_TRUE(c.insertions.empty());
}

TEST(Canonicalize, EmptyProcess) {
  const auto c = canonicalize_arbitrary(from_digits("01", 2), {});
  EXPECT_TRUE(c.deletions.empty());
  EXPECT_TRUE(c.insertions.empty());
}

TEST(Canonicalize, CursorOutOfRange) {
  const Sequence x = from_digits("01", 2);
  for (const ArbitraryEdit& bad : {ArbitraryEdit::del(0), ArbitraryEdit::del(3), ArbitraryEdit::ins(3, 0)}) {
    try {
      canonicalize_arbitrary(x, {bad});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kCursorOutOfRange);
    }
  }
}

// Oracle: direct replay in the given order.
TEST(Canonicalize, RandomSixEditProcessesMatchDirectReplay) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    SplitMix64 rng(seed, 99);
    Sequence x = gen_pre_ess(8, 3, seed);
    std::vector<ArbitraryEdit> edits;
    std::size_t len = x.size();
    for (int k = 0; k < 6; ++k) {
      if (len == 0 || rng.below(2) == 0) {
        edits.push_back(ArbitraryEdit::ins(rng.below(len + 1), static_cast<Symbol>(rng.below(3))));
        ++len;
      } else {
        edits.push_back(ArbitraryEdit::del(1 + rng.below(len)));
        --len;
      }
    }
    const CanonicalEdits c = canonicalize_arbitrary(x, edits);
    const Sequence direct = replay_arbitrary(x, edits);
    ASSERT_EQ(apply_canonical(x, c), direct) << "seed " << seed;
    ASSERT_EQ(replay_arbitrary(x, to_arbitrary_edits(c)), direct);
    ASSERT_EQ(apply_edit_pattern(x, to_edit_pattern(x, c)), direct);
  }
}

// Every process of at most three edits on every x of length <= 5, a = 3.
TEST(Canonicalize, ExhaustiveSmallProcesses) {
  std::size_t cases = 0;
  std::function<void(const Sequence&, std::vector<ArbitraryEdit>&, std::size_t)> rec =
      [&](const Sequence& x, std::vector<ArbitraryEdit>& edits, std::size_t len) {
        const CanonicalEdits c = canonicalize_arbitrary(x, edits);
        ASSERT_EQ(apply_canonical(x, c), replay_arbitrary(x, edits));
        ++cases;
        if (edits.size() == 3) return;
        for (std::size_t p = 0; p <= len; ++p) {
          for (Symbol s = 0; s < 3; ++s) {
            edits.push_back(ArbitraryEdit::ins(p, s));
            rec(x, edits, len + 1);
            edits.pop_back();
          }
          if (p > 0) {
            edits.push_back(ArbitraryEdit::del(p));
            rec(x, edits, len - 1);
            edits.pop_back();
          }
        }
      };
  for (std::size_t n = 0; n <= 5; ++n) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      Sequence x;
      x.alphabet = 3;
      for (std::size_t k = 0, v = code; k < n; ++k, v /= 3) x.symbols.push_back(static_cast<Symbol>(v % 3));
      std::vector<ArbitraryEdit> edits;
      rec(x, edits, n);
    }
  }
  EXPECT_GT(cases, 1000000u);
}
