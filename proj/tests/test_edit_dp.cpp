// SPDX-License-Identifier: Apache-2.0
//
// Quadratic and banded InDel distance, checked against an independent
// longest-common-subsequence oracle and against each other.

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "indel/edit_dp.hpp"
#include "indel/sim.hpp"

using namespace indel;

namespace {

// InDel distance = |x| + |y| - 2 LCS(x, y), computed by plain memoised
// recursion rather than the table layout used by the library.
std::size_t oracle_distance(const Sequence& x, const Sequence& y) {
  std::vector<std::vector<int>> memo(x.size() + 1, std::vector<int>(y.size() + 1, -1));
  std::function<int(std::size_t, std::size_t)> lcs = [&](std::size_t i, std::size_t j) -> int {
    if (i == x.size() || j == y.size()) return 0;
    int& m = memo[i][j];
    if (m >= 0) return m;
    m = x[i] == y[j] ? 1 + lcs(i + 1, j + 1) : std::max(lcs(i + 1, j), lcs(i, j + 1));
    return m;
  };
  return x.size() + y.size() - 2 * static_cast<std::size_t>(lcs(0, 0));
}

void expect_valid(const Sequence& x, const Sequence& y, const DpResult& r) {
  EXPECT_EQ(apply_edit_pattern(x, r.script), y);
  EXPECT_EQ(r.distance, r.k_ins + r.k_del);
  EXPECT_EQ(static_cast<long long>(r.k_del) - static_cast<long long>(r.k_ins),
            static_cast<long long>(x.size()) - static_cast<long long>(y.size()));
}

// All patterns over x with at most `budget` edits, passed to `visit`.
void for_each_pattern(std::size_t n, std::uint32_t a, std::size_t budget,
                      const std::function<void(const EditPattern&)>& visit) {
  EditPattern e;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (left > 0) {
      for (Symbol c = 0; c < a; ++c) {
        e.push(EditOp::ins(c));
        rec(i, left - 1);
        e.ops.pop_back();
        e.recount();
      }
    }
    if (i == n) {
      visit(e);
      return;
    }
    e.push(EditOp::noop());
    rec(i + 1, left);
    e.ops.pop_back();
    if (left > 0) {
      e.push(EditOp::del());
      rec(i + 1, left - 1);
      e.ops.pop_back();
    }
    e.recount();
  };
  rec(0, budget);
}

}  // namespace

TEST(EditDistanceFull, IdenticalInputsGiveAllNoOps) {
  const Sequence x = from_digits("0101", 2);
  const DpResult r = edit_distance_full(x, x);
  EXPECT_EQ(r.distance, 0u);
  EXPECT_EQ(r.script, identity_pattern(4));
}

TEST(EditDistanceFull, TwoDeletions) {
  const DpResult r = edit_distance_full(from_digits("00000", 2), from_digits("000", 2));
  EXPECT_EQ(r.distance, 2u);
  EXPECT_EQ(r.k_del, 2u);
  EXPECT_EQ(r.k_ins, 0u);
}

// Forward tie-break: NoOp on a match, otherwise Delete when it stays on an
// optimal path, otherwise Insert.
TEST(EditDistanceFull, TieBreakPicksDeleteBeforeInsert) {
  const Sequence x = from_digits("0101", 3);
  const Sequence y = from_digits("0121", 3);
  const DpResult r = edit_distance_full(x, y);
  EXPECT_EQ(r.distance, 2u);
  const EditPattern expected(
      {EditOp::noop(), EditOp::noop(), EditOp::del(), EditOp::ins(2), EditOp::noop()});
  EXPECT_EQ(r.script, expected);
}

// Oracle: every script with at most two edits, keeping the ones that reach y.
TEST(EditDistanceFull, NoScriptWithFewerEditsExists) {
  const Sequence x = from_digits("0101", 3);
  const Sequence y = from_digits("0121", 3);
  std::size_t best = 99;
  std::size_t optimal_scripts = 0;
  for_each_pattern(4, 3, 2, [&](const EditPattern& e) {
    if (apply_edit_pattern(x, e) == y) {
      const std::size_t k = e.k_ins + e.k_del;
      if (k < best) {
        best = k;
        optimal_scripts = 0;
      }
      if (k == best) ++optimal_scripts;
    }
  });
  EXPECT_EQ(best, 2u);
  EXPECT_GE(optimal_scripts, 1u);
  EXPECT_EQ(edit_distance_full(x, y).distance, best);
}

TEST(EditDistanceFull, AlphabetMismatch) {
  try {
    edit_distance_full(from_digits("01", 2), from_digits("01", 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlphabetMismatch);
  }
}

TEST(EditDistanceFull, EmptyInputs) {
  const Sequence e(2, {});
  EXPECT_EQ(edit_distance_full(e, e).distance, 0u);
  EXPECT_EQ(edit_distance_full(e, from_digits("011", 2)).k_ins, 3u);
  EXPECT_EQ(edit_distance_full(from_digits("011", 2), e).k_del, 3u);
}

TEST(EditDistanceFull, MatchesOracleOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::uint32_t a = seed % 2 ? 2 : 4;
    const Sequence x = gen_pre_ess(seed % 40, a, seed);
    const Sequence y = gen_pre_ess((seed * 7) % 40, a, seed + 1000);
    const DpResult r = edit_distance_full(x, y);
    EXPECT_EQ(r.distance, oracle_distance(x, y));
    expect_valid(x, y, r);
  }
}

TEST(EditDistanceBanded, IdenticalInputsUseFirstBand) {
  const Sequence x = gen_pre_ess(1000, 4, 3);
  const DpResult r = edit_distance_banded(x, x);
  EXPECT_EQ(r.distance, 0u);
  EXPECT_EQ(r.script, identity_pattern(1000));
}

TEST(EditDistanceBanded, AlternatingWithThreeDeletions) {
  const Sequence x = make_construction(Construction::alternating(), 100, 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng(seed, 5);
    std::vector<std::size_t> idx(100);
    for (std::size_t i = 0; i < 100; ++i) idx[i] = i;
    for (std::size_t t = 0; t < 3; ++t) std::swap(idx[t], idx[t + rng.below(100 - t)]);
    std::vector<bool> drop(100, false);
    for (std::size_t t = 0; t < 3; ++t) drop[idx[t]] = true;
    Sequence y(2, {});
    for (std::size_t i = 0; i < 100; ++i) {
      if (!drop[i]) y.symbols.push_back(x[i]);
    }
    const DpResult r = edit_distance_banded(x, y);
    EXPECT_EQ(r.distance, 3u);
    EXPECT_EQ(r.distance, oracle_distance(x, y));
    expect_valid(x, y, r);
  }
}

// The banded variant must return the same script as the quadratic one, not
// only the same distance, since both follow the same tie-break.
TEST(EditDistanceBanded, EquivalentToFullOnRandomPairs) {
  const std::uint32_t alphabets[] = {2, 4, 256};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::uint32_t a = alphabets[seed % 3];
    SplitMix64 rng(seed, 11);
    const std::size_t n = rng.below(201);
    const Sequence x = gen_pre_ess(n, a, seed);
    const double rate = 0.002 * static_cast<double>(rng.below(100));
    const auto [e, y] = gen_ltrrid(x, RpesParams{n, a, rate, rate, seed});
    const DpResult full = edit_distance_full(x, y);
    const DpResult band = edit_distance_banded(x, y);
    ASSERT_EQ(band.distance, full.distance) << "seed " << seed;
    EXPECT_EQ(band.script, full.script) << "seed " << seed;
    EXPECT_LE(full.distance, e.k_ins + e.k_del);
    expect_valid(x, y, band);
  }
}

TEST(EditDistanceBanded, UnrelatedSequences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Sequence x = gen_pre_ess(150, 3, seed);
    const Sequence y = gen_pre_ess(90, 3, seed + 77);
    const DpResult band = edit_distance_banded(x, y);
    EXPECT_EQ(band.distance, oracle_distance(x, y));
    EXPECT_EQ(band.script, edit_distance_full(x, y).script);
  }
}

// Every x with |x| <= 5 over a = 2 and every pattern with at most 3 edits;
// the DP never reports more insertions or deletions than actually happened.
TEST(EditDistanceBanded, ExhaustiveSmallInstances) {
  std::size_t cases = 0;
  for (std::size_t n = 0; n <= 5; ++n) {
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
      Sequence x(2, {});
      for (std::size_t k = 0; k < n; ++k) x.symbols.push_back(static_cast<Symbol>((code >> k) & 1));
      for_each_pattern(n, 2, 3, [&](const EditPattern& e) {
        const Sequence y = apply_edit_pattern(x, e);
        const DpResult band = edit_distance_banded(x, y);
        ASSERT_EQ(band.distance, edit_distance_full(x, y).distance);
        ASSERT_LE(band.k_ins, e.k_ins);
        ASSERT_LE(band.k_del, e.k_del);
        ++cases;
      });
    }
  }
  EXPECT_GT(cases, 10000u);
}

TEST(EditDistanceBanded, LongInputsWithFewEdits) {
  const Sequence x = gen_pre_ess(200000, 256, 9);
  const auto [e, y] = gen_ltrrid(x, RpesParams{x.size(), 256, 0.001, 0.001, 9});
  const DpResult r = edit_distance_banded(x, y);
  EXPECT_LE(r.distance, e.k_ins + e.k_del);
  expect_valid(x, y, r);
}
