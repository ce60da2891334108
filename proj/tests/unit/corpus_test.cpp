#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "valex/corpus.hpp"
#include "valex/error.hpp"

using namespace valex;

namespace {

std::string record(const std::string& id, const std::string& influencer, const std::string& retrieved = "2024-01-01",
                   bool pinned = false, bool verbal = true, const std::string& genre = "lifestyle") {
  return R"({"video_id":")" + id + R"(","influencer_id":")" + influencer + R"(","genre":")" + genre +
         R"(","has_verbal_sound":)" + (verbal ? "true" : "false") + R"(,"pinned":)" + (pinned ? "true" : "false") +
         R"(,"retrieved_at":")" + retrieved + "\"}\n";
}

CorpusManifest synthetic(std::size_t videos, std::size_t influencers) {
  std::string text;
  for (std::size_t i = 0; i < videos; ++i) text += record("v" + std::to_string(i), "i" + std::to_string(i % influencers));
  return parse_manifest(text);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

}  // namespace

TEST(Manifest, ParsesAndRoundTrips) {
  const auto m = parse_manifest(record("a", "x", "2024-02-03T04:05:06Z", true) + "\n# note\n" +
                                record("b", "y", "2024-02-04", false, false, "Crafts and DIY"));
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_TRUE(m.records[0].pinned);
  EXPECT_FALSE(m.records[1].has_verbal_sound);
  EXPECT_EQ(m.records[1].genre, Genre::CraftsDiy);
  EXPECT_EQ(m.find("b")->influencer_id, "y");
  EXPECT_EQ(m.find("zzz"), nullptr);
  EXPECT_EQ(parse_manifest(format_manifest(m)).records, m.records);
}

TEST(Manifest, ErrorsNameTheLine) {
  try {
    parse_manifest(record("a", "x") + record("a", "y"), "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
    EXPECT_NE(std::string(e.what()).find("m.jsonl:2"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_manifest(record("a", "x", "2024-01-01", false, true, "cooking")); }),
            ErrorCode::UnknownGenre);
  EXPECT_EQ(code_of([] { parse_manifest("{not json}\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_manifest(R"({"video_id":"a"})"); }), ErrorCode::Parse);
  EXPECT_TRUE(parse_manifest("").records.empty());
}

TEST(Manifest, FilterVerbal) {
  const auto m = parse_manifest(record("a", "x") + record("b", "x", "2024-01-01", false, false));
  const auto f = filter_verbal(m);
  ASSERT_EQ(f.records.size(), 1u);
  EXPECT_EQ(f.records[0].video_id, "a");
}

TEST(Sampling, PinnedFirstThenNewest) {
  const auto m = parse_manifest(record("old", "x", "2024-01-01") + record("new", "x", "2024-03-01") +
                                record("pin", "x", "2023-01-01", true) + record("mid", "x", "2024-02-01") +
                                record("y1", "y", "2024-01-01"));
  const auto s = sample_per_influencer(m, 2);
  std::vector<std::string> ids;
  for (const auto& r : s.records) ids.push_back(r.video_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"pin", "new", "y1"}));
  EXPECT_EQ(code_of([&] { sample_per_influencer(m, 0); }), ErrorCode::InvalidArgument);
}

TEST(Split, PartitionIsCompleteAndDisjoint) {
  const auto m = synthetic(200, 23);
  const auto s = split_corpus(m, {}, StratifyKey::Influencer, 5);
  std::multiset<std::string> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 200u);
  EXPECT_EQ(std::set<std::string>(all.begin(), all.end()).size(), 200u);
}

TEST(Split, InfluencersNeverStraddleParts) {
  const auto m = synthetic(300, 31);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = split_corpus(m, {}, StratifyKey::Influencer, seed);
    std::map<std::string, int> part_of;
    auto mark = [&](const std::vector<std::string>& ids, int part) {
      for (const auto& id : ids) {
        const auto inf = m.find(id)->influencer_id;
        const auto [it, inserted] = part_of.try_emplace(inf, part);
        EXPECT_EQ(it->second, part) << inf;
      }
    };
    mark(s.train, 0);
    mark(s.validation, 1);
    mark(s.test, 2);
  }
}

TEST(Split, DeterministicPerSeed) {
  const auto m = synthetic(120, 15);
  EXPECT_EQ(split_corpus(m, {}, StratifyKey::Influencer, 9), split_corpus(m, {}, StratifyKey::Influencer, 9));
  EXPECT_NE(split_corpus(m, {}, StratifyKey::Influencer, 9).test, split_corpus(m, {}, StratifyKey::Influencer, 10).test);
}

TEST(Split, UnstratifiedFollowsRatios) {
  const auto m = synthetic(100, 3);
  const auto s = split_corpus(m, {0.7, 0.1, 0.2}, StratifyKey::None, 1);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.validation.size(), 10u);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

TEST(Split, EveryNonEmptyPartGetsAUnit) {
  const auto m = synthetic(30, 3);
  const auto s = split_corpus(m, {0.8, 0.1, 0.1}, StratifyKey::Influencer, 2);
  EXPECT_FALSE(s.train.empty());
  EXPECT_FALSE(s.validation.empty());
  EXPECT_FALSE(s.test.empty());
}

TEST(Split, RejectsBadRatiosAndTooFewUnits) {
  const auto m = synthetic(10, 2);
  EXPECT_EQ(code_of([&] { split_corpus(m, {0.5, 0.5, 0.5}, StratifyKey::None, 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { split_corpus(m, {1.2, -0.1, -0.1}, StratifyKey::None, 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { split_corpus(m, {}, StratifyKey::Influencer, 0); }), ErrorCode::InfeasibleSplit);
}

TEST(Stats, CountsAndHistogram) {
  const auto m = synthetic(3, 1);
  GoldSet gold;
  gold.emplace("v0", fixtures::tennis_gold());
  AnnotationVector one;
  one.set("ACHIEVEMENT", Label::Present);
  gold.emplace("v1", one);
  gold.emplace("v2", AnnotationVector{});
  const auto st = corpus_stats(m, gold);
  EXPECT_EQ(st.n_videos, 3u);
  EXPECT_EQ(st.n_labels, 3u);
  EXPECT_EQ(st.count({4, Polarity::Present}), 2u);
  EXPECT_EQ(st.count({7, Polarity::Conflicted}), 1u);
  EXPECT_EQ(st.labels_per_video_histogram.at(0), 1u);
  EXPECT_EQ(st.labels_per_video_histogram.at(1), 1u);
  EXPECT_EQ(st.labels_per_video_histogram.at(2), 1u);
}

TEST(Stats, MissingGoldIsListed) {
  const auto m = synthetic(2, 1);
  GoldSet gold{{"v0", AnnotationVector{}}};
  try {
    corpus_stats(m, gold);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingGold);
    EXPECT_NE(std::string(e.what()).find("v1"), std::string::npos);
  }
}

TEST(Stats, EmptyCorpusIsZero) {
  const auto st = corpus_stats(CorpusManifest{}, GoldSet{});
  EXPECT_EQ(st.n_videos, 0u);
  EXPECT_EQ(st.n_labels, 0u);
}
