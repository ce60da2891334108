#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "valex/agreement.hpp"
#include "valex/error.hpp"

using namespace valex;

namespace {

std::vector<AgreementItem> items_from(const std::vector<std::pair<int, int>>& ratings) {
  std::vector<AgreementItem> items;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    items.push_back({"v" + std::to_string(i / kValueCount), i % kValueCount, ratings[i].first, ratings[i].second});
  }
  return items;
}

std::vector<std::pair<int, int>> repeat(int a, int b, int n) { return std::vector<std::pair<int, int>>(n, {a, b}); }

std::vector<std::pair<int, int>> concat(std::initializer_list<std::vector<std::pair<int, int>>> parts) {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

TEST(Consolidate, AgreementKeptDisputesResolved) {
  AnnotationVector a(std::string("a")), b(std::string("b"));
  a.set("ACHIEVEMENT", Label::Present);
  b.set("ACHIEVEMENT", Label::Present);
  a.set("FACE", Label::Present);
  const auto out = consolidate({"t", a, b}, Resolution{{7, Label::Conflicted}});
  EXPECT_TRUE(out.same_labels(fixtures::tennis_gold()));
}

TEST(Consolidate, IdenticalRatersNeedNoResolver) {
  const auto v = fixtures::tennis_gold();
  AnnotationVector a = v, b = v;
  a.set_annotator_id("a");
  b.set_annotator_id("b");
  EXPECT_TRUE(consolidate({"t", a, b}, {}).same_labels(v));
}

TEST(Consolidate, Errors) {
  AnnotationVector a(std::string("a")), b(std::string("b"));
  a.set("FACE", Label::Present);
  try {
    consolidate({"t", a, b}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteResolution);
    EXPECT_NE(std::string(e.what()).find("FACE"), std::string::npos);
  }
  AnnotationVector a2(std::string("a"));
  try {
    consolidate({"t", a, a2}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Consolidate, DiffersFromRaterOnlyAtDisputes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = fixtures::random_vector(rng, 0.3, 0.2);
    auto b = fixtures::random_vector(rng, 0.3, 0.2);
    a.set_annotator_id("a");
    b.set_annotator_id("b");
    Resolution res;
    std::size_t disputes = 0;
    for (std::size_t v = 0; v < kValueCount; ++v) {
      if (a[v] != b[v]) {
        ++disputes;
        res[v] = (rng() % 2) ? a[v] : Label::Conflicted;
      }
    }
    const auto out = consolidate({"x", a, b}, res);
    std::size_t diff = 0;
    for (std::size_t v = 0; v < kValueCount; ++v) diff += out[v] != a[v];
    EXPECT_LE(diff, disputes);
  }
}

TEST(Items, NineteenPerPair) {
  EXPECT_TRUE(agreement_items({}).empty());
  AnnotationVector a(std::string("a")), b(std::string("b"));
  const std::vector<AnnotationPair> pairs{{"v", a, b}};
  const auto items = agreement_items(pairs);
  ASSERT_EQ(items.size(), 19u);
  for (const auto& it : items) {
    EXPECT_EQ(it.category_a, 0);
    EXPECT_EQ(it.category_b, 0);
  }
}

TEST(Items, PairsFromRowsNeedTwoRaters) {
  const auto rows = parse_annotation_rows("v1,a,FACE,1\nv1,b,FACE,1\nv1,r,FACE,1\nv2,a,NONE,0\n");
  try {
    pairs_from_rows(rows, "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("v2"), std::string::npos);
  }
  const auto ok = parse_annotation_rows("v1,a,FACE,1\nv1,b,FACE,1\nv1,r,FACE,1\n");
  EXPECT_EQ(pairs_from_rows(ok, "r").size(), 1u);
}

TEST(Percent, DirectCounts) {
  EXPECT_DOUBLE_EQ(percent_agreement(items_from(repeat(1, 1, 10))).coefficient, 1.0);
  EXPECT_DOUBLE_EQ(percent_agreement(items_from(concat({repeat(0, 0, 5), repeat(0, 1, 5)}))).coefficient, 0.5);
  EXPECT_DOUBLE_EQ(percent_agreement(items_from(concat({repeat(0, 0, 7), repeat(-1, 1, 3)}))).coefficient, 0.7);
}

TEST(Ac1, PerfectAgreementIsOne) {
  EXPECT_EQ(gwet_ac1(items_from(concat({repeat(0, 0, 40), repeat(1, 1, 5), repeat(-1, -1, 2)}))).coefficient, 1.0);
  EXPECT_EQ(gwet_ac1(items_from(repeat(0, 0, 19))).coefficient, 1.0);
}

TEST(Ac1, TwoCategoryTotalDisagreementIsMinusOne) {
  const std::vector<int> two{0, 1};
  const auto r = gwet_ac1(items_from(concat({repeat(0, 1, 10), repeat(1, 0, 10)})), two);
  EXPECT_DOUBLE_EQ(r.observed_agreement, 0.0);
  EXPECT_DOUBLE_EQ(r.chance_agreement, 0.5);
  EXPECT_DOUBLE_EQ(r.coefficient, -1.0);
}

TEST(Ac1, RejectsCategoryOutsideUniverse) {
  try {
    gwet_ac1(items_from({{2, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Kappa, TwoByTwoTableMatchesHandEvaluation) {
  // p_o = 60/100; rater A marginals (60, 40), rater B (70, 30);
  // p_e = 0.6*0.7 + 0.4*0.3 = 0.54; kappa = 0.06 / 0.46 = 3/23.
  const auto items = items_from(concat({repeat(1, 1, 45), repeat(1, 0, 15), repeat(0, 1, 25), repeat(0, 0, 15)}));
  const auto r = cohen_kappa(items);
  EXPECT_NEAR(r.observed_agreement, 0.6, 1e-12);
  EXPECT_NEAR(r.chance_agreement, 0.54, 1e-12);
  EXPECT_NEAR(r.coefficient, 3.0 / 23.0, 1e-12);
}

TEST(Kappa, PerfectAgreementWithTwoCategoriesIsOne) {
  EXPECT_DOUBLE_EQ(cohen_kappa(items_from(concat({repeat(1, 1, 3), repeat(0, 0, 7)}))).coefficient, 1.0);
}

TEST(Kappa, IndependentRatersNearZero) {
  std::mt19937_64 rng(21);
  std::vector<std::pair<int, int>> r;
  for (int i = 0; i < 10000; ++i) r.emplace_back(static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 3) - 1);
  EXPECT_NEAR(cohen_kappa(items_from(r)).coefficient, 0.0, 0.05);
}

TEST(Agreement, EmptyInputRejected) {
  for (auto fn : {+[] { percent_agreement({}); }, +[] { cohen_kappa({}); }, +[] { gwet_ac1({}); }}) {
    try {
      fn();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
  }
}

TEST(Agreement, MatchesContingencyOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 50 + rng() % 2000;
    std::vector<std::pair<int, int>> r;
    const int skew = static_cast<int>(rng() % 4);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = static_cast<int>(rng() % (3 + skew)) - 1;
      const int b = rng() % 3 == 0 ? static_cast<int>(rng() % 3) - 1 : std::clamp(a, -1, 1);
      r.emplace_back(std::clamp(a, -1, 1), b);
    }
    const auto t = oracle::tabulate(r, {-1, 0, 1});
    const auto items = items_from(r);
    EXPECT_NEAR(percent_agreement(items).coefficient, oracle::observed(t), 1e-9);
    EXPECT_NEAR(cohen_kappa(items).coefficient, oracle::kappa(t), 1e-9);
    EXPECT_NEAR(gwet_ac1(items).coefficient, oracle::ac1(t), 1e-9);
  }
}

TEST(Agreement, MarginalsSumToOne) {
  const auto r = gwet_ac1(items_from(concat({repeat(0, 0, 10), repeat(1, -1, 4)})));
  double sum = 0;
  for (const auto& [k, p] : r.category_marginals) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Agreement, ReportIsJson) {
  const auto items = items_from(repeat(0, 0, 19));
  const std::vector<AgreementResult> rs{gwet_ac1(items), cohen_kappa(items)};
  const auto text = format_agreement_report(rs);
  EXPECT_NE(text.find("gwet_ac1"), std::string::npos) << text;
  EXPECT_NE(text.find("n_items"), std::string::npos);
}
