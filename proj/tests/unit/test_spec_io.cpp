#include <gtest/gtest.h>

#include <sstream>

#include "itact/error.hpp"
#include "itact/log.hpp"
#include "itact/spec_io.hpp"

using namespace itact;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_spec(text, "t.json");
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

const char* kSource = R"({
  "kind": "source",
  "alphabets": {"X": 2, "A": 1, "Se": 1, "Sd": 2, "Xhat": 2},
  "source": [0.5, 0.5],
  "si_channel": [[[[0.75, 0.25]]], [[[0.25, 0.75]]]],
  "distortion": [[0, 1], [1, 0]],
  "cost": [0]
})";

}  // namespace

TEST(SpecIo, BundledRewriteChannel) {
  const auto any = load_spec(std::string(ITACT_SPEC_DIR) + "/rewrite_delta01.json");
  const auto& c = std::get<ChannelSpec>(any);
  EXPECT_EQ(c.na, 2u);
  EXPECT_EQ(c.nx, 2u);
  EXPECT_EQ(c.nse, 2u);
  EXPECT_EQ(c.ny, 2u);
  EXPECT_EQ(c.nsd, 1u);
  EXPECT_TRUE(c.action_dependent);
  // X = 1 rewrites: Y is A through BSC(0.1)
  EXPECT_DOUBLE_EQ(c.p_y(1, 0, 0, 0, 1), 0.1);
}

TEST(SpecIo, SourceParses) {
  const auto s = std::get<SourceSpec>(parse_spec(kSource));
  EXPECT_EQ(s.nsd, 2u);
  EXPECT_DOUBLE_EQ(s.p_si(1, 0, 0, 1), 0.75);
}

TEST(SpecIo, NearlyNormalizedRowAcceptedWithWarning) {
  std::vector<std::string> seen;
  auto prev = set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  std::string text = kSource;
  text.replace(text.find("[0.5, 0.5]"), 10, "[0.5, 0.499999]");
  const auto s = std::get<SourceSpec>(parse_spec(text));
  set_warning_sink(prev);
  EXPECT_NEAR(s.source[0] + s.source[1], 1.0, 1e-15);
  EXPECT_FALSE(seen.empty());
}

TEST(SpecIo, DistinctErrors) {
  std::string neg = kSource;
  neg.replace(neg.find("[0.75, 0.25]"), 12, "[1.25, -0.25]");
  EXPECT_NE(error_of(neg).find("/si_channel/0/0"), std::string::npos) << error_of(neg);
  EXPECT_NE(error_of(neg).find("negative"), std::string::npos);

  std::string sum = kSource;
  sum.replace(sum.find("[0.5, 0.5]"), 10, "[0.5, 0.4]");
  EXPECT_NE(error_of(sum).find("sum"), std::string::npos);

  std::string mismatch = kSource;
  mismatch.replace(mismatch.find("\"cost\": [0]"), 11, "\"cost\": [0, 1]");
  EXPECT_NE(error_of(mismatch).find("alphabet mismatch"), std::string::npos) << error_of(mismatch);
  EXPECT_NE(error_of(mismatch).find("/cost"), std::string::npos);

  const auto syntax = error_of("{\n  \"kind\": \"source\",\n  oops\n}");
  EXPECT_NE(syntax.find("t.json:3:"), std::string::npos) << syntax;

  EXPECT_NE(error_of(R"({"kind": "other"})").find("/kind"), std::string::npos);
  EXPECT_NE(error_of(R"({"kind": "source"})").find("/alphabets"), std::string::npos);
  EXPECT_THROW(load_spec("/nonexistent/spec.json"), InvalidInput);
}

TEST(SpecIo, RoundTripIsExact) {
  CounterRng rng(4);
  const auto src = random_source_spec(rng, 3, 2, 2, 2, 3);
  const auto back = std::get<SourceSpec>(parse_spec(emit_spec(src)));
  EXPECT_TRUE(std::equal(src.si_channel.table().begin(), src.si_channel.table().end(),
                         back.si_channel.table().begin()));
  EXPECT_EQ(src.distortion, back.distortion);
  const auto ch = random_channel_spec(rng, 2, 3, 2, 2, 3, true);
  const auto cback = std::get<ChannelSpec>(parse_spec(emit_spec(ch)));
  EXPECT_TRUE(std::equal(ch.main_channel.table().begin(), ch.main_channel.table().end(),
                         cback.main_channel.table().begin()));
  EXPECT_EQ(emit_spec(ch), emit_spec(cback));
}

TEST(Csv, HeaderContractAndNumbers) {
  std::ostringstream out;
  CsvWriter w(out, {"D", "value", "mode"});
  w << 0.1 << (1.0 / 3.0) << "cr";
  w.end_row();
  EXPECT_EQ(out.str(), "# itact v1\nD,value,mode\n0.1,0.333333333,cr\n");
  std::istringstream in(out.str());
  const auto t = read_csv(in);
  EXPECT_DOUBLE_EQ(t.number(0, "value"), 0.333333333);
  EXPECT_THROW(t.column("missing"), InvalidInput);
  EXPECT_EQ(format_number(-0.0), "0");
  w << 1.0;
  EXPECT_THROW(w.end_row(), InvalidInput);
}

TEST(Grid, Syntax) {
  const auto g = parse_grid("0:0.025:11");
  ASSERT_EQ(g.size(), 11u);
  EXPECT_NEAR(g.back(), 0.25, 1e-15);
  EXPECT_EQ(parse_grid("8,12,16"), (std::vector<double>{8, 12, 16}));
  EXPECT_THROW(parse_grid("0:1"), InvalidInput);
  EXPECT_THROW(parse_grid("0:1:0"), InvalidInput);
  EXPECT_THROW(parse_grid("a,b"), InvalidInput);
}
