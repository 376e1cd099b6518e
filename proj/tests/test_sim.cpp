// SPDX-License-Identifier: Apache-2.0
//
// Source generator, left-to-right random InDel process, arbitrary-edit
// policies, constructions and the corpus file format.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "indel/sim.hpp"
#include "indel/theory.hpp"

using namespace indel;

TEST(PreEss, EmptySequence) { EXPECT_TRUE(gen_pre_ess(0, 2, 1).empty()); }

TEST(PreEss, BinaryOnesFractionWithinThreeSigma) {
  const Sequence x = gen_pre_ess(1000000, 2, 12345);
  std::size_t ones = 0;
  for (Symbol c : x.symbols) ones += c;
  EXPECT_NEAR(double(ones) / 1e6, 0.5, 3 * 0.0005);
}

TEST(PreEss, Deterministic) {
  EXPECT_EQ(gen_pre_ess(1000, 256, 77), gen_pre_ess(1000, 256, 77));
  EXPECT_NE(gen_pre_ess(1000, 256, 77), gen_pre_ess(1000, 256, 78));
}

TEST(Ltrrid, ZeroRatesKeepEverything) {
  const Sequence x = gen_pre_ess(500, 4, 1);
  const auto [e, y] = gen_ltrrid(x, RpesParams{500, 4, 0, 0, 1});
  EXPECT_EQ(e, identity_pattern(500));
  EXPECT_EQ(y, x);
}

TEST(Ltrrid, CertainDeletionEmptiesTheSequence) {
  const Sequence x = gen_pre_ess(500, 4, 1);
  const auto [e, y] = gen_ltrrid(x, RpesParams{500, 4, 0, 1, 1});
  EXPECT_EQ(e, EditPattern(std::vector<EditOp>(500, EditOp::del())));
  EXPECT_TRUE(y.empty());
}

TEST(Ltrrid, RejectsInvalidRates) {
  const Sequence x = gen_pre_ess(5, 2, 1);
  EXPECT_THROW(gen_ltrrid(x, RpesParams{5, 2, 1.0, 0, 1}), Error);
  EXPECT_THROW(gen_ltrrid(x, RpesParams{5, 2, 0.6, 0.6, 1}), Error);
  EXPECT_THROW(gen_ltrrid(x, RpesParams{4, 2, 0.1, 0.1, 1}), Error);
}

TEST(Ltrrid, ConsumesExactlyNSymbols) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Sequence x = gen_pre_ess(seed % 97, 3, seed);
    const auto [e, y] = gen_ltrrid(x, RpesParams{x.size(), 3, 0.2, 0.3, seed});
    EXPECT_EQ(e.source_length(), x.size());
    EXPECT_EQ(apply_edit_pattern(x, e), y);
  }
}

TEST(Ltrrid, InsertProbabilityPerDraw) {
  // Every draw inserts with probability eps; draws = ops + 1 (the final stop).
  const Sequence x = gen_pre_ess(200000, 2, 2);
  const auto [e, y] = gen_ltrrid(x, RpesParams{x.size(), 2, 0.1, 0.05, 2});
  const double draws = double(e.ops.size() + 1);
  const double p = double(e.k_ins) / draws;
  EXPECT_NEAR(p, 0.1, 3 * std::sqrt(0.1 * 0.9 / draws));
}

// K_D ~ B(n, del/(1-eps)) and K_I ~ NB(n+1; eps): checked on the sample
// means over 200 seeds at three standard errors.
TEST(Ltrrid, EditCountLaws) {
  const std::size_t n = 100000;
  const double eps = 0.02, del = 0.01;
  double sum_d = 0, sum_i = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const Sequence x = gen_pre_ess(n, 256, 1000 + s);
    const auto [e, y] = gen_ltrrid(x, RpesParams{n, 256, eps, del, 5000u + s});
    sum_d += double(e.k_del);
    sum_i += double(e.k_ins);
  }
  const double pd = del / (1 - eps);
  const double mean_d = n * pd;
  const double sd_d = std::sqrt(n * pd * (1 - pd) / seeds);
  const double mean_i = (n + 1) * eps / (1 - eps);
  const double sd_i = std::sqrt((n + 1) * eps / ((1 - eps) * (1 - eps)) / seeds);
  EXPECT_NEAR(sum_d / seeds, mean_d, 3 * sd_d);
  EXPECT_NEAR(sum_i / seeds, mean_i, 3 * sd_i);
}

TEST(Apes, ZeroBudgetKeepsTheSource) {
  const Sequence x = gen_pre_ess(100, 4, 1);
  for (auto policy : {ApesPolicy::kUniformRandom}) {
    const auto [edits, y] = gen_apes(x, ApesParams{100, 4, 0, 0, policy, 1});
    EXPECT_TRUE(edits.empty());
    EXPECT_EQ(y, x);
  }
  const Sequence alt = make_construction(Construction::alternating(), 10, 3);
  const auto [edits, y] = gen_apes(alt, ApesParams{10, 3, 0, 0, ApesPolicy::kWorstCaseLB, 1});
  EXPECT_EQ(y, alt);
}

TEST(Apes, UniformPolicyRespectsBudgets) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Sequence x = gen_pre_ess(1000, 256, seed);
    const ApesParams p = ApesParams::from_rates(1000, 256, 0.05, 0.05, ApesPolicy::kUniformRandom, seed);
    const auto [edits, y] = gen_apes(x, p);
    std::size_t ins = 0, del = 0;
    for (const ArbitraryEdit& e : edits) (e.op == ArbitraryOp::kInsert ? ins : del) += 1;
    ASSERT_LE(ins, 50u);
    ASSERT_LE(del, 50u);
    ASSERT_EQ(replay_arbitrary(x, edits), y);
  }
}

TEST(Apes, WorstCasePatternsLandInPostEditSetAndAreDistinct) {
  const Sequence x = make_construction(Construction::alternating(), 6, 3);
  const auto set = enumerate_post_edit_set(x, 1, 1, EditBudget::kExactly);
  using Key = std::vector<std::tuple<std::size_t, int, Symbol>>;
  std::map<Key, Sequence> seen;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto [edits, y] = gen_apes(x, ApesParams{6, 3, 1, 1, ApesPolicy::kWorstCaseLB, seed});
    EXPECT_TRUE(set.count(y.symbols));
    EXPECT_EQ(y.size(), 6u);
    Key key;
    for (const ArbitraryEdit& e : edits) key.emplace_back(e.cursor, static_cast<int>(e.op), e.content);
    seen.emplace(key, y);
  }
  std::set<std::vector<Symbol>> outputs;
  for (const auto& [edits, y] : seen) outputs.insert(y.symbols);
  EXPECT_EQ(outputs.size(), seen.size());
  EXPECT_GE(seen.size(), 30u);
}

TEST(Apes, WorstCasePreconditions) {
  const Sequence x = gen_pre_ess(10, 3, 4);
  try {
    gen_apes(make_construction(Construction::alternating(), 10, 2),
             ApesParams{10, 2, 1, 1, ApesPolicy::kWorstCaseLB, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPolicyPreconditionViolated);
  }
  if (!is_alternating(x)) {
    EXPECT_THROW(gen_apes(x, ApesParams{10, 3, 1, 1, ApesPolicy::kWorstCaseLB, 1}), Error);
  }
  EXPECT_THROW(gen_apes(make_construction(Construction::alternating(), 4, 3),
                        ApesParams{4, 3, 0, 3, ApesPolicy::kWorstCaseLB, 1}),
               Error);
}

TEST(Constructions, Examples) {
  EXPECT_EQ(to_digits(make_construction(Construction::alternating(), 6, 2)), "010101");
  EXPECT_EQ(to_digits(make_construction(Construction::all_same(0), 4, 2)), "0000");
  EXPECT_EQ(to_digits(make_construction(Construction::all_distinct(), 5, 3)), "01201");
  EXPECT_THROW(make_construction(Construction::all_same(3), 4, 2), Error);
}

TEST(Corpus, WriteAndReadBack) {
  const auto dir = std::filesystem::temp_directory_path() / "indel_test_corpus";
  std::filesystem::remove_all(dir);
  for (std::uint32_t a : {2u, 256u, 65536u}) {
    const CorpusPair p = generate_corpus_pair(CorpusModel::kRpes, 3000, a, 0.01, 0.02, 9);
    const std::string name = "pair_a" + std::to_string(a);
    write_corpus_pair(dir, name, p);
    const CorpusPair q = read_corpus_pair(dir / (name + ".bin"));
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.y, p.y);
    EXPECT_EQ(q.meta, p.meta);
    EXPECT_EQ(q.meta["model"], "rpes");
    EXPECT_TRUE(std::filesystem::exists(dir / (name + ".json")));
  }
  std::filesystem::remove_all(dir);
}

TEST(Corpus, RejectsForeignFiles) {
  const auto path = std::filesystem::temp_directory_path() / "indel_test_not_corpus.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "JUNKJUNK";
  }
  try {
    read_corpus_pair(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
  std::filesystem::remove(path);
}

TEST(Corpus, WorstCasePolicyUsesAlternatingSource) {
  const CorpusPair p = generate_corpus_pair(CorpusModel::kApes, 100, 4, 0.05, 0.05, 3, ApesPolicy::kWorstCaseLB);
  EXPECT_TRUE(is_alternating(p.x));
  EXPECT_EQ(p.meta["k_ins"], 5);
  EXPECT_EQ(p.meta["k_del"], 5);
  EXPECT_EQ(p.meta["policy"], "worst-case");
}
