#include "msseg/error.hpp"
#include "msseg/eval.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace msseg;

namespace {

FaceLabeling parse(const std::string& text) {
  std::istringstream in(text);
  return parse_seg(in);
}

FaceLabeling labeling(std::initializer_list<long> l) { return FaceLabeling{std::vector<long>(l)}; }

}  // namespace

TEST(ParseSeg, Basic) {
  EXPECT_EQ(parse("0\n0\n1\n").labels, (std::vector<long>{0, 0, 1}));
  EXPECT_EQ(parse("").size(), 0u);
  std::string ten;
  for (int i = 0; i < 10; ++i) ten += "7\n";
  const FaceLabeling l = parse(ten);
  EXPECT_EQ(l.size(), 10u);
  for (long x : l.labels) EXPECT_EQ(x, 7);
}

TEST(ParseSeg, BlankLinesAndWhitespace) {
  EXPECT_EQ(parse(" 3 \r\n\n4\n").labels, (std::vector<long>{3, 4}));
}

TEST(ParseSeg, BadLineNamed) {
  try {
    parse("1\n2\nx\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse("1.5\n"), FormatError);
}

TEST(ParseSeg, WriteRoundTrip) {
  const FaceLabeling l = labeling({4, 0, 2, 2});
  std::ostringstream out;
  write_seg(out, l);
  EXPECT_EQ(parse(out.str()).labels, l.labels);
}

TEST(RandIndex, IdenticalAndPermuted) {
  const FaceLabeling a = labeling({0, 0, 1, 2, 2, 2});
  EXPECT_EQ(rand_index_dissimilarity(a, a), 0.0);
  EXPECT_EQ(rand_index_dissimilarity(a, labeling({5, 5, 9, 1, 1, 1})), 0.0);
}

TEST(RandIndex, WorkedFourFaceCase) {
  EXPECT_NEAR(rand_index_dissimilarity(labeling({0, 0, 1, 1}), labeling({0, 1, 0, 1})), 100.0 * (1.0 - 2.0 / 6.0),
              1e-12);
}

TEST(RandIndex, Errors) {
  EXPECT_THROW(rand_index_dissimilarity(labeling({0, 1}), labeling({0})), DimensionError);
  EXPECT_THROW(rand_index_dissimilarity(labeling({0}), labeling({0})), PreconditionError);
  EXPECT_THROW(rand_index_dissimilarity(labeling({0, 1}), std::vector<FaceLabeling>{}), PreconditionError);
}

TEST(RandIndex, MatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(2, 200);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    std::uniform_int_distribution<int> la(0, 1 + trial % 6), lb(0, 1 + trial % 4);
    FaceLabeling a, b;
    for (int i = 0; i < n; ++i) {
      a.labels.push_back(la(rng));
      b.labels.push_back(lb(rng) * 10);
    }
    const double fast = rand_index_dissimilarity(a, b);
    EXPECT_NEAR(fast, oracle::rand_index_brute(a, b), 1e-10);
    EXPECT_NEAR(fast, rand_index_dissimilarity(b, a), 1e-12);
    EXPECT_GE(fast, 0.0);
    EXPECT_LE(fast, 100.0);
  }
}

TEST(RandIndex, MeanOverTruths) {
  const FaceLabeling a = labeling({0, 0, 1, 1});
  const std::vector<FaceLabeling> truths = {labeling({0, 0, 1, 1}), labeling({0, 1, 0, 1})};
  EXPECT_NEAR(rand_index_dissimilarity(a, truths), 0.5 * 100.0 * (4.0 / 6.0), 1e-12);
}

TEST(ScoreRows, Csv) {
  std::ostringstream out;
  write_score_header(out);
  write_score_row(out, {"m1", "gpsms", 3, 8.6712345});
  EXPECT_EQ(out.str(), "mesh_id,method,K,score\nm1,gpsms,3,8.6712\n");
}
