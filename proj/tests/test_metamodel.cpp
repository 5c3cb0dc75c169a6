#include <gtest/gtest.h>

#include "subsum/metamodel.hpp"
#include "subsum/sim/controller.hpp"

namespace subsum {
namespace {

const SystemModel& example() {
  static const SystemModel m = sim::example_model();
  return m;
}

TEST(Resolve, FindsOutputOfRunaway) {
  auto r = resolve(example(), "runaway.heading");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->direction, LineDirection::output);
  EXPECT_EQ(r->module->name, "runaway");
  EXPECT_EQ(r->line->data_type, "Heading");
}

TEST(Resolve, MissingModuleIsNotFound) { EXPECT_FALSE(resolve(example(), "nosuch.x")); }

TEST(Resolve, MissingLineIsNotFound) { EXPECT_FALSE(resolve(example(), "sonar.nope")); }

TEST(Resolve, MalformedPathIsNotFound) {
  EXPECT_FALSE(resolve(example(), "sonar"));
  EXPECT_FALSE(resolve(example(), "sonar.map.x"));
  EXPECT_FALSE(resolve(example(), ".map"));
}

TEST(Resolve, AgreesWithLinearScanOnEveryLine) {
  const auto& m = example();
  for (std::size_t mi = 0; mi < m.modules.size(); ++mi) {
    const auto& mod = m.modules[mi];
    for (std::size_t li = 0; li < mod.inputs.size(); ++li) {
      auto r = resolve(m, mod.name + "." + mod.inputs[li].name);
      ASSERT_TRUE(r);
      EXPECT_EQ(r->direction, LineDirection::input);
      EXPECT_EQ(r->module_index, mi);
      EXPECT_EQ(r->line_index, li);
    }
    for (std::size_t li = 0; li < mod.outputs.size(); ++li) {
      auto r = resolve(m, mod.name + "." + mod.outputs[li].name);
      ASSERT_TRUE(r);
      EXPECT_EQ(r->direction, LineDirection::output);
      EXPECT_EQ(r->module_index, mi);
      EXPECT_EQ(r->line_index, li);
    }
  }
  auto sonar = resolve(m, "sonar.map");
  ASSERT_TRUE(sonar);
  EXPECT_EQ(sonar->direction, LineDirection::output);
  EXPECT_EQ(sonar->module->name, "sonar");
}

TEST(Layers, ExampleHasTwo) { EXPECT_EQ(layers(example()), (std::set<std::uint32_t>{0, 1})); }

TEST(Layers, EmptySystemHasNone) { EXPECT_TRUE(layers(SystemModel{}).empty()); }

TEST(Layers, DeduplicatesAndSorts) {
  SystemModel m;
  for (std::uint32_t l : {3u, 0u, 3u}) m.modules.push_back(ModuleDecl{"m" + std::to_string(m.modules.size()), {}, l, {}, {}, {}});
  EXPECT_EQ(layers(m), (std::set<std::uint32_t>{0, 3}));
}

TEST(Identifier, Rules) {
  EXPECT_TRUE(is_identifier("a"));
  EXPECT_TRUE(is_identifier("_x9"));
  EXPECT_TRUE(is_identifier("Module"));
  EXPECT_FALSE(is_identifier(""));
  EXPECT_FALSE(is_identifier("9a"));
  EXPECT_FALSE(is_identifier("a-b"));
  EXPECT_FALSE(is_identifier("a.b"));
}

TEST(ParseQualified, SplitsOnSingleDot) {
  auto r = parse_qualified("turn.heading");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->module, "turn");
  EXPECT_EQ(r->line, "heading");
  EXPECT_EQ(r->str(), "turn.heading");
  EXPECT_FALSE(parse_qualified("turn"));
  EXPECT_FALSE(parse_qualified("turn."));
}

TEST(Equality, IgnoresSpans) {
  SystemModel a = example();
  SystemModel b = a;
  b.modules[0].span = SourceSpan{1, 2, 3, 4};
  b.wires[0].source.span = SourceSpan{5, 6, 7, 8};
  EXPECT_EQ(a, b);
  b.modules[0].layer = 9;
  EXPECT_NE(a, b);
}

TEST(Example, WellFormedShape) {
  const auto& m = example();
  EXPECT_EQ(m.modules.size(), 8u);
  ASSERT_EQ(m.modifiers.size(), 1u);
  EXPECT_EQ(m.modifiers[0].kind, ModifierKind::suppressor);
  EXPECT_EQ(m.modifiers[0].target.str(), "turn.heading");
  EXPECT_EQ(m.modifiers[0].controlled_by.str(), "avoid.heading");
  // Every stored reference resolves, and each sink has exactly one wire.
  for (const auto& w : m.wires) {
    EXPECT_TRUE(resolve(m, w.source)) << w.source.str();
    EXPECT_TRUE(resolve(m, w.sink)) << w.sink.str();
    int same = 0;
    for (const auto& v : m.wires) same += v.sink == w.sink;
    EXPECT_EQ(same, 1);
  }
}

}  // namespace
}  // namespace subsum
