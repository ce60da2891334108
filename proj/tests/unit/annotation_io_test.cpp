#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "valex/annotation_io.hpp"
#include "valex/error.hpp"

using namespace valex;

namespace {

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

TEST(AnnotationRows, ParsesCommaAndTabWithHeaderAndComments) {
  const auto rows = parse_annotation_rows(
      "video_id,annotator_id,value_name,label\n"
      "# comment\n"
      "v1,a1,ACHIEVEMENT,+1\n"
      "v1\ta1\tface\t-1\n"
      "v2,a1,NONE,0\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, 4u);
  EXPECT_EQ(rows[0].label, Label::Present);
  EXPECT_EQ(rows[1].value, 7u);
  EXPECT_EQ(rows[1].label, Label::Conflicted);
  EXPECT_FALSE(rows[2].value);
  EXPECT_EQ(rows[2].line, 5u);
}

TEST(AnnotationRows, ErrorsCarrySourceAndLine) {
  try {
    parse_annotation_rows("v1,a1,ACHIEVEMENT,1\nv1,a1,ACHIEVEMENT,2\n", "gold.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("gold.csv:2:"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_annotation_rows("v1,a1,KINDNESS,1\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_annotation_rows("v1,a1,ACHIEVEMENT\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_annotation_rows("v1,a1,NONE,1\n"); }), ErrorCode::Parse);
}

TEST(AnnotationRows, ConflictingDuplicateIsRejected) {
  const auto rows = parse_annotation_rows("v1,a1,FACE,1\nv1,a1,FACE,-1\n");
  EXPECT_EQ(code_of([&] { group_by_rater(rows); }), ErrorCode::Parse);
  const auto same = parse_annotation_rows("v1,a1,FACE,1\nv1,a1,FACE,1\n");
  EXPECT_EQ(group_by_rater(same).size(), 1u);
}

TEST(Gold, OneAnnotatorPerVideo) {
  const auto rows = parse_annotation_rows("v1,a1,FACE,1\nv1,a2,FACE,1\n");
  EXPECT_EQ(code_of([&] { gold_from_rows(rows); }), ErrorCode::InvalidArgument);
}

TEST(Gold, AllAbsentVideoSurvivesRoundTrip) {
  GoldSet gold;
  gold.emplace("empty", AnnotationVector{});
  gold.emplace("tennis", fixtures::tennis_gold());
  const auto text = format_annotations(gold, "gold");
  EXPECT_EQ(text,
            "video_id,annotator_id,value_name,label\n"
            "empty,gold,NONE,0\n"
            "tennis,gold,ACHIEVEMENT,+1\n"
            "tennis,gold,FACE,-1\n");
  const auto back = gold_from_rows(parse_annotation_rows(text));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back.at("empty").same_labels(AnnotationVector{}));
  EXPECT_TRUE(back.at("tennis").same_labels(fixtures::tennis_gold()));
  EXPECT_EQ(back.at("tennis").annotator_id(), "gold");
}

TEST(Gold, RandomRoundTripProperty) {
  std::mt19937_64 rng(3);
  GoldSet gold;
  for (int i = 0; i < 200; ++i) gold.emplace("v" + std::to_string(i), fixtures::random_vector(rng));
  const auto back = gold_from_rows(parse_annotation_rows(format_annotations(gold, "x")));
  ASSERT_EQ(back.size(), gold.size());
  for (const auto& [id, v] : gold) EXPECT_TRUE(back.at(id).same_labels(v)) << id;
}

TEST(Gold, FileRoundTrip) {
  fixtures::TempDir dir;
  GoldSet gold{{"t", fixtures::tennis_gold()}};
  write_annotations(dir / "sub/gold.csv", gold, "r");
  EXPECT_TRUE(read_gold(dir / "sub/gold.csv").at("t").same_labels(fixtures::tennis_gold()));
  EXPECT_EQ(code_of([&] { read_gold(dir / "missing.csv"); }), ErrorCode::Io);
}

TEST(Resolutions, CollectsOnlyResolverRows) {
  const auto rows = parse_annotation_rows("v1,a,FACE,1\nv1,b,FACE,-1\nv1,r,FACE,0\nv2,r,HEDONISM,1\n");
  const auto res = resolutions_from_rows(rows, "r");
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res.at("v1").at(7), Label::Absent);
  EXPECT_EQ(res.at("v2").at(3), Label::Present);
}
