#include <gtest/gtest.h>

#include <random>

#include "rankaudit/data_model.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/io.hpp"
#include "support.hpp"

using namespace rankaudit;
using rankaudit::testing::TempDir;

namespace {

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(MetricKind, ParsesExactNames) {
  EXPECT_EQ(parse_metric_kind("DSC"), MetricKind::DSC);
  EXPECT_EQ(parse_metric_kind("NSD"), MetricKind::NSD);
  EXPECT_THROW(parse_metric_kind("dsc"), ValidationError);
  EXPECT_EQ(kAllMetrics.size(), 2U);
}

TEST(ScoreTable, BuilderRejectsInvalidScores) {
  ScoreTable::Builder b;
  EXPECT_THROW(b.set("a", "c", "t", MetricKind::DSC, 1.2), ValidationError);
  EXPECT_THROW(b.set("a", "c", "t", MetricKind::DSC, -0.01), ValidationError);
  EXPECT_THROW(b.set("a", "c", "t", MetricKind::DSC, std::nan("")), ValidationError);
  b.set("a", "c", "t", MetricKind::DSC, 0.0);
  EXPECT_THROW(b.set("a", "c", "t", MetricKind::DSC, 0.5), ValidationError);
  EXPECT_THROW(b.set("a", "c", "t", MetricKind::DSC, std::nullopt), ValidationError);
  b.set("a", "c", "t", MetricKind::NSD, 1.0);
  b.set_family("a", "f");
  EXPECT_THROW(b.set_family("a", "g"), ValidationError);
}

TEST(ScoreTable, MissingIsDistinctFromZero) {
  ScoreTable::Builder b;
  b.set("a", "c1", "t", MetricKind::DSC, 0.0);
  b.set("a", "c2", "t", MetricKind::DSC, std::nullopt);
  const ScoreTable t = b.build();
  EXPECT_EQ(t.score("a", "c1", "t", MetricKind::DSC), 0.0);
  EXPECT_EQ(t.score("a", "c2", "t", MetricKind::DSC), std::nullopt);
  EXPECT_EQ(t.state(0, 1, 0, MetricKind::DSC), ScoreTable::CellState::Missing);
  EXPECT_EQ(t.state(0, 0, 0, MetricKind::NSD), ScoreTable::CellState::Absent);
  EXPECT_EQ(t.entry_count(), 1U);
  EXPECT_EQ(t.missing_count(), 1U);
}

TEST(LoadScoreTable, FourRowsTwoMethods) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv",
                           "method,case,target,metric,score\n"
                           "A,c1,liver,DSC,0.9\n"
                           "A,c1,liver,NSD,0.8\n"
                           "B,c1,liver,DSC,0.7\n"
                           "B,c1,liver,NSD,0.6\n");
  const ScoreTable t = load_score_table(p);
  EXPECT_EQ(t.entry_count(), 4U);
  EXPECT_EQ(t.missing_count(), 0U);
  EXPECT_EQ(t.methods(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(t.score("B", "c1", "liver", MetricKind::NSD), 0.6);
}

TEST(LoadScoreTable, OutOfRangeScoreNamesLine) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv",
                           "method,case,target,metric,score\n"
                           "A,c1,liver,DSC,0.9\n"
                           "A,c2,liver,DSC,1.2\n");
  EXPECT_THROW(load_score_table(p), ValidationError);
  EXPECT_NE(message_of([&] { load_score_table(p); }).find("line 3"), std::string::npos);
}

TEST(LoadScoreTable, DuplicateKeyRejected) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv",
                           "method,case,target,metric,score\n"
                           "A,c1,liver,DSC,0.9\n"
                           "A,c1,liver,DSC,0.8\n");
  EXPECT_THROW(load_score_table(p), ValidationError);
}

TEST(LoadScoreTable, WrongColumnCountIsParseErrorWithLine) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv",
                           "method,case,target,metric,score\n"
                           "A,c1,liver,DSC,0.9\n"
                           "\n"
                           "A,c2,liver,DSC\n");
  try {
    load_score_table(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4U);
  }
}

TEST(LoadScoreTable, NonNumericScoreIsParseError) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv", "method,case,target,metric,score\nA,c1,liver,DSC,high\n");
  EXPECT_THROW(load_score_table(p), ParseError);
}

TEST(LoadScoreTable, BlankScoreRoundTripsAsMissing) {
  ScoreTable::Builder b;
  b.set("A", "c1", "liver", MetricKind::DSC, 0.91);
  b.set("A", "c2", "liver", MetricKind::DSC, std::nullopt);
  b.set("B", "c1", "liver", MetricKind::DSC, 0.5);
  const ScoreTable t = b.build();
  TempDir dir("scores");
  write_score_table(t, dir / "s.csv");
  const ScoreTable back = load_score_table(dir / "s.csv");
  EXPECT_EQ(back.score("A", "c2", "liver", MetricKind::DSC), std::nullopt);
  EXPECT_EQ(back.state(0, 1, 0, MetricKind::DSC), ScoreTable::CellState::Missing);
  EXPECT_EQ(back, t);
}

TEST(LoadScoreTable, CustomSchemaAndDelimiter) {
  TempDir dir("scores");
  const auto p = dir.write("s.tsv", "model\tsubject\torgan\tkind\tvalue\tgroup\nA\tc1\tliver\tDSC\t0.25\tcnn\n");
  ScoreSchema schema;
  schema.method = "model";
  schema.case_id = "subject";
  schema.target = "organ";
  schema.metric = "kind";
  schema.score = "value";
  schema.family = "group";
  schema.delimiter = '\t';
  const ScoreTable t = load_score_table(p, schema);
  EXPECT_EQ(t.score("A", "c1", "liver", MetricKind::DSC), 0.25);
  EXPECT_EQ(t.family("A"), "cnn");
}

TEST(LoadScoreTable, QuotedFields) {
  TempDir dir("scores");
  const auto p = dir.write("s.csv", "method,case,target,metric,score\n\"net, v2\",c1,\"liver\",DSC,0.5\n");
  const ScoreTable t = load_score_table(p);
  EXPECT_EQ(t.methods().front(), "net, v2");
}

TEST(LoadDemographics, ThreeCasesTwoAttributes) {
  TempDir dir("demo");
  const auto p = dir.write("d.csv", "case,sex,race\nc1,F,A\nc2,M,B\nc3,F,B\n");
  const DemographicTable d = load_demographics(p);
  EXPECT_EQ(d.size(), 3U);
  EXPECT_EQ(d.attributes(), (std::vector<std::string>{"sex", "race"}));
  EXPECT_EQ(d.value("c2", "race"), "B");
  EXPECT_THROW(d.value("c9", "race"), LookupError);
  EXPECT_THROW(d.value("c1", "age"), LookupError);
}

TEST(LoadDemographics, DuplicateCaseRejected) {
  TempDir dir("demo");
  const auto p = dir.write("d.csv", "case,sex\nc1,F\nc1,M\n");
  EXPECT_THROW(load_demographics(p), ValidationError);
}

TEST(LoadDemographics, EmptyCellRoundTripsAsUnknown) {
  DemographicTable d({"sex", "race"});
  d.add_record("c1", {"F", ""});
  d.add_record("c2", {"M", "B"});
  EXPECT_EQ(d.value("c1", "race"), "unknown");
  TempDir dir("demo");
  write_demographics(d, dir / "d.csv");
  const DemographicTable back = load_demographics(dir / "d.csv");
  EXPECT_EQ(back.value("c1", "race"), "unknown");
  EXPECT_EQ(back, d);

  const auto p = dir.write("e.csv", "case,sex,race\nc1,F,\n");
  EXPECT_EQ(load_demographics(p).value("c1", "race"), "unknown");
}

TEST(VoxelMask, ValidatesGeometry) {
  EXPECT_THROW(VoxelMask({0, 1, 1}, {1, 1, 1}), ValidationError);
  EXPECT_THROW(VoxelMask({1, 1, 1}, {1, 0, 1}), ValidationError);
  EXPECT_THROW(VoxelMask({1, 1, 1}, {1, -2, 1}), ValidationError);
  EXPECT_THROW(VoxelMask({2, 1, 1}, {1, 1, 1}, {1}), FormatError);
  EXPECT_THROW(VoxelMask({2, 1, 1}, {1, 1, 1}, {1, 2}), FormatError);
}

TEST(LoadMask, AllOnesCube) {
  TempDir dir("mask");
  dir.write("m.toml", "dims = [2, 2, 2]\nspacing_mm = [1.0, 1.0, 1.0]\ndata_file = \"m.raw\"\n");
  dir.write("m.raw", std::string(8, '\x01'));
  const VoxelMask m = load_mask(dir / "m.toml");
  EXPECT_EQ(m.count(), 8U);
}

TEST(LoadMask, ShortRawFileIsFormatError) {
  TempDir dir("mask");
  dir.write("m.toml", "dims = [2, 2, 2]\nspacing_mm = [1.0, 1.0, 1.0]\ndata_file = \"m.raw\"\n");
  dir.write("m.raw", std::string(7, '\x01'));
  EXPECT_THROW(load_mask(dir / "m.toml"), FormatError);
}

TEST(LoadMask, NonBinaryByteIsFormatErrorNamingByte) {
  TempDir dir("mask");
  dir.write("m.toml", "dims = [3, 1, 1]\nspacing_mm = [1.0, 1.0, 1.0]\ndata_file = \"m.raw\"\n");
  dir.write("m.raw", std::string("\x01\x00\x07", 3));
  EXPECT_THROW(load_mask(dir / "m.toml"), FormatError);
  EXPECT_NE(message_of([&] { load_mask(dir / "m.toml"); }).find("byte 2"), std::string::npos);
}

TEST(LoadMask, NonPositiveSpacingIsValidationError) {
  TempDir dir("mask");
  dir.write("m.toml", "dims = [1, 1, 1]\nspacing_mm = [1.0, 0.0, 1.0]\ndata_file = \"m.raw\"\n");
  dir.write("m.raw", std::string(1, '\x01'));
  EXPECT_THROW(load_mask(dir / "m.toml"), ValidationError);
}

TEST(LoadMask, AnisotropicRowRoundTrip) {
  const VoxelMask m({3, 1, 1}, {2.0, 1.0, 1.0}, {1, 0, 1});
  TempDir dir("mask");
  write_mask(m, dir / "row.toml", "row.raw");
  const VoxelMask back = load_mask(dir / "row.toml");
  EXPECT_EQ(back, m);
  EXPECT_TRUE(back.at(0, 0, 0));
  EXPECT_FALSE(back.at(1, 0, 0));
  EXPECT_TRUE(back.at(2, 0, 0));
  EXPECT_EQ(back.spacing(), (Spacing{2.0, 1.0, 1.0}));
}

TEST(LoadMask, XFastestOrder) {
  TempDir dir("mask");
  dir.write("m.toml", "dims = [2, 2, 1]\nspacing_mm = [1, 1, 1]\ndata_file = \"m.raw\"\n");
  dir.write("m.raw", std::string("\x00\x01\x00\x00", 4));
  const VoxelMask m = load_mask(dir / "m.toml");
  EXPECT_TRUE(m.at(1, 0, 0));
  EXPECT_FALSE(m.at(0, 1, 0));
}

// Round-trip properties over random values.

TEST(RoundTripProperty, ScoreTables) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int iter = 0; iter < 50; ++iter) {
    ScoreTable::Builder b;
    const std::size_t methods = 1 + rng() % 4, cases = 1 + rng() % 6, targets = 1 + rng() % 3;
    const bool families = rng() % 2 == 0;
    for (std::size_t m = 0; m < methods; ++m) {
      const std::string id = "m" + std::to_string(m);
      if (families) b.set_family(id, "fam" + std::to_string(m % 2));
      for (std::size_t c = 0; c < cases; ++c)
        for (std::size_t t = 0; t < targets; ++t)
          for (MetricKind k : kAllMetrics) {
            const double roll = unit(rng);
            if (roll < 0.1) continue;
            std::optional<double> v;
            if (roll > 0.2) v = unit(rng);
            if (roll > 0.95) v = 1.0;
            b.set(id, "case" + std::to_string(c), "t" + std::to_string(t), k, v);
          }
    }
    const ScoreTable t = b.build();
    if (t.methods().empty()) continue;
    TempDir dir("rt");
    write_score_table(t, dir / "s.csv");
    const ScoreTable back = load_score_table(dir / "s.csv");
    for (const auto& m : t.methods())
      for (const auto& c : t.cases())
        for (const auto& tg : t.targets())
          for (MetricKind k : kAllMetrics) ASSERT_EQ(back.score(m, c, tg, k), t.score(m, c, tg, k));
    ASSERT_EQ(back.missing_count(), t.missing_count());
    ASSERT_EQ(back.families(), t.families());
  }
}

TEST(RoundTripProperty, DemographicsAndMasks) {
  std::mt19937_64 rng(12);
  const char* values[] = {"A", "B", "", "x y", "q,\"z\""};
  for (int iter = 0; iter < 30; ++iter) {
    DemographicTable d({"a1", "a2", "a3"});
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t c = 0; c < n; ++c) {
      d.add_record("c" + std::to_string(c), {values[rng() % 5], values[rng() % 5], values[rng() % 5]});
    }
    TempDir dir("rt");
    write_demographics(d, dir / "d.csv");
    ASSERT_EQ(load_demographics(dir / "d.csv"), d);

    const VoxelMask m = rankaudit::testing::random_mask(rng, rankaudit::testing::random_dims(rng, 6),
                                                        rankaudit::testing::random_spacing(rng), 0.4);
    write_mask(m, dir / "m.toml", "m.raw");
    ASSERT_EQ(load_mask(dir / "m.toml"), m);
  }
}
