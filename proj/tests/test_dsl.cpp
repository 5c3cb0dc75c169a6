#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "subsum/dsl.hpp"
#include "support/random_model.hpp"

namespace subsum::dsl {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example_text() { return slurp(SUBSUM_FIXTURES "/example.sub"); }

TEST(Parse, MinimalSystem) {
  auto r = parse("system s { }");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->name, "s");
  EXPECT_FALSE(r.model->description);
  EXPECT_TRUE(r.model->data_types.empty());
  EXPECT_TRUE(r.model->modules.empty());
  EXPECT_TRUE(r.model->wires.empty());
  EXPECT_TRUE(r.model->modifiers.empty());
}

TEST(Parse, ExampleFile) {
  auto r = parse(example_text());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->modules.size(), 8u);
  ASSERT_EQ(r.model->modifiers.size(), 1u);
  EXPECT_EQ(r.model->modifiers[0].kind, ModifierKind::suppressor);
  EXPECT_EQ(r.model->modifiers[0].time_ms, 250);
  EXPECT_EQ(r.model->wires.size(), 8u);
  EXPECT_EQ(r.model->modules[1].name, "collide");
  EXPECT_EQ(r.model->modules[6].layer, 1u);
}

TEST(Parse, TruncatedWireReportsMissingSink) {
  auto r = parse("system s { wire a.b -> }");
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.model);
  ASSERT_FALSE(r.errors.empty());
  EXPECT_EQ(r.errors[0].span.line, 1u);
  EXPECT_EQ(r.errors[0].span.column, 24u);
  EXPECT_EQ(r.errors[0].span.start, 23u);
  EXPECT_NE(r.errors[0].message.find("identifier"), std::string::npos) << r.errors[0].message;
}

TEST(Parse, RecoversToReportSeveralErrors) {
  auto r = parse(
      "system s {\n"
      "  type ;\n"
      "  module m layer x { }\n"
      "  wire a.b c.d;\n"
      "  type T;\n"
      "}\n");
  ASSERT_GE(r.errors.size(), 3u);
  EXPECT_EQ(r.errors[0].span.line, 2u);
  EXPECT_EQ(r.errors[1].span.line, 3u);
  EXPECT_EQ(r.errors[2].span.line, 4u);
}

TEST(Parse, LexicalErrors) {
  auto bad_char = parse("system s { @ }");
  ASSERT_FALSE(bad_char.errors.empty());
  EXPECT_EQ(bad_char.errors[0].span.column, 12u);

  auto unterminated = parse("system s \"abc\n{ }");
  ASSERT_FALSE(unterminated.errors.empty());
  EXPECT_NE(unterminated.errors[0].message.find("unterminated"), std::string::npos);
}

TEST(Parse, KeywordsAreContextual) {
  auto r = parse("system module { type in; module layer layer 2 { in out: in; out in2: in; } }");
  ASSERT_TRUE(r.ok()) << r.errors[0].message;
  EXPECT_EQ(r.model->name, "module");
  EXPECT_EQ(r.model->modules[0].name, "layer");
  EXPECT_EQ(r.model->modules[0].inputs[0].name, "out");
}

TEST(Parse, StringEscapes) {
  auto r = parse(R"(system s "a \"q\" b\\c\nd\te" { })");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.model->description, "a \"q\" b\\c\nd\te");
}

TEST(Parse, NumberOutOfRange) {
  auto r = parse("system s { module m layer 99999999999 { } }");
  ASSERT_FALSE(r.errors.empty());
  EXPECT_NE(r.errors[0].message.find("out of range"), std::string::npos);
}

TEST(Parse, NegativeTimeIsLeftToValidation) {
  auto r = parse("system s { type T; module a layer 0 { in i: T; out o: T; } inhibit a.o by a.o for -5 ms; }");
  ASSERT_TRUE(r.ok()) << r.errors[0].message;
  EXPECT_EQ(r.model->modifiers[0].time_ms, -5);
  EXPECT_EQ(format(*r.model).find("for -5 ms;") != std::string::npos, true);
  auto layer = parse("system s { module m layer -1 { } }");
  ASSERT_FALSE(layer.errors.empty());
  EXPECT_NE(layer.errors[0].message.find("out of range"), std::string::npos);
}

TEST(Parse, ExpectedTokensListed) {
  auto r = parse("system s { bogus }");
  ASSERT_FALSE(r.errors.empty());
  const auto& e = r.errors[0].expected;
  EXPECT_NE(std::find(e.begin(), e.end(), "'module'"), e.end());
}

TEST(Format, MinimalSystem) {
  EXPECT_EQ(format(*parse("system s { }").model), "system s {\n}\n");
}

TEST(Format, ExampleIsCanonical) {
  const auto text = example_text();
  EXPECT_EQ(format(*parse(text).model), text);
}

TEST(Format, Idempotent) {
  const auto once = format(*parse(example_text()).model);
  EXPECT_EQ(format(*parse(once).model), once);
}

TEST(Format, MessyTwinMatchesTidyForm) {
  const std::string tidy =
      "system s \"d\" {\n"
      "  type T;\n"
      "\n"
      "  module a layer 0 {\n"
      "    out o: T;\n"
      "  }\n"
      "  module b layer 1 \"x\" {\n"
      "    in i: T;\n"
      "  }\n"
      "\n"
      "  wire a.o -> b.i;\n"
      "\n"
      "  inhibit a.o by a.o for 5 ms;\n"
      "}\n";
  const std::string messy =
      "# leading comment\n"
      "system   s\"d\"{type T ;module a layer 0{out o:T;}   # trailing\n"
      "\twire a.o->b.i;\n"
      "inhibit a . o by a.o for 5ms ;\n"
      "module b layer 1 \"x\" {\n in i : T ; }}\n";
  auto r = parse(messy);
  ASSERT_TRUE(r.ok()) << r.errors[0].message;
  EXPECT_EQ(format(*r.model), tidy);
  EXPECT_EQ(format(*parse(tidy).model), tidy);
}

TEST(Format, QuoteEscapes) {
  EXPECT_EQ(quote("a\"b\\c\nd\te"), "\"a\\\"b\\\\c\\nd\\te\"");
}

TEST(RoundTrip, RandomModels) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto m = testing::random_valid_model(rng);
    const auto text = format(m);
    auto r = parse(text);
    ASSERT_TRUE(r.ok()) << text << "\n" << r.errors[0].message;
    EXPECT_EQ(*r.model, m) << text;
    EXPECT_EQ(format(*r.model), text);
  }
}

TEST(RoundTrip, PreservesDeclarationOrder) {
  auto r = parse("system s { wire b.x -> c.y; type T; wire a.x -> c.z; module z layer 0 {} module a layer 0 {} }");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.model->wires.size(), 2u);
  EXPECT_EQ(r.model->wires[0].source.module, "b");
  EXPECT_EQ(r.model->modules[0].name, "z");
  auto again = parse(format(*r.model));
  EXPECT_EQ(*again.model, *r.model);
}

TEST(Spans, ErrorsStayInsideInput) {
  std::mt19937_64 rng(11);
  const auto text = example_text();
  const std::string junk = "{};.->\"#@ x9";
  for (int i = 0; i < 500; ++i) {
    std::string t = text;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      const auto pos = rng() % (t.size() + 1);
      if (rng() % 2 && pos < t.size()) {
        t.erase(pos, 1 + rng() % 5);
      } else {
        t.insert(pos, 1, junk[rng() % junk.size()]);
      }
    }
    auto r = parse(t);
    for (const auto& err : r.errors) {
      EXPECT_LE(err.span.start, err.span.end);
      EXPECT_LE(err.span.end, t.size());
      EXPECT_FALSE(err.message.empty());
      const auto recomputed = span_at(t, err.span.start, err.span.end);
      EXPECT_EQ(recomputed.line, err.span.line);
      EXPECT_EQ(recomputed.column, err.span.column);
    }
    EXPECT_EQ(r.ok(), r.errors.empty());
  }
}

TEST(Spans, ModelElementsCarryLocations) {
  auto r = parse(example_text());
  ASSERT_TRUE(r.ok());
  const auto& sonar = r.model->modules[0];
  ASSERT_TRUE(sonar.span);
  EXPECT_EQ(sonar.span->line, 8u);
  EXPECT_EQ(sonar.span->column, 3u);
}

}  // namespace
}  // namespace subsum::dsl
