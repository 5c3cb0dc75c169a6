#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "subsum/dsl.hpp"
#include "subsum/sim/controller.hpp"
#include "subsum/validate.hpp"
#include "support/oracles.hpp"
#include "support/random_model.hpp"

namespace subsum {
namespace {

SystemModel load(const std::string& name) {
  std::ifstream in(std::string(SUBSUM_FIXTURES) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto r = dsl::parse(ss.str());
  EXPECT_TRUE(r.ok()) << name;
  return r.ok() ? *r.model : SystemModel{};
}

std::vector<int> codes(const std::vector<Diagnostic>& ds) {
  std::vector<int> out;
  for (const auto& d : ds) out.push_back(static_cast<int>(d.code));
  return out;
}

testing::Verdicts verdicts(const std::vector<Diagnostic>& ds) {
  testing::Verdicts v;
  for (const auto& d : ds) v.insert({static_cast<int>(d.code), d.location});
  return v;
}

TEST(Validate, ExampleIsValid) { EXPECT_TRUE(validate(sim::example_model()).empty()); }

TEST(Validate, LowerLayerSuppressingHigherIsV4) {
  auto m = sim::example_model();
  m.modifiers.push_back(Modifier{ModifierKind::suppressor, {"avoid", "force", {}},
                                 {"feelforce", "force", {}}, 100, {}});
  EXPECT_EQ(codes(validate(m)), std::vector<int>{4});
}

TEST(Validate, SecondWireIntoTurnIsV3) {
  auto m = sim::example_model();
  m.wires.push_back(Wire{{"avoid", "heading", {}}, {"turn", "heading", {}}, {}});
  EXPECT_EQ(codes(validate(m)), std::vector<int>{3});
}

TEST(Validate, ZeroTimeIsV7) {
  auto m = sim::example_model();
  m.modifiers[0].time_ms = 0;
  EXPECT_EQ(codes(validate(m)), std::vector<int>{7});
  m.modifiers[0].time_ms = -5;
  EXPECT_EQ(codes(validate(m)), std::vector<int>{7});
  m.modifiers[0].time_ms = 1;
  EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, LowerLayerInhibitingHigherIsV5) {
  auto m = sim::example_model();
  m.modifiers.push_back(Modifier{ModifierKind::inhibitor, {"wander", "heading", {}},
                                 {"collide", "halt", {}}, 10, {}});
  EXPECT_EQ(codes(validate(m)), std::vector<int>{5});
  // Same layer is allowed.
  m.modifiers.back().controlled_by = {"avoid", "heading", {}};
  EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, SelfInterceptionAllowed) {
  auto m = sim::example_model();
  m.modifiers.push_back(Modifier{ModifierKind::inhibitor, {"avoid", "heading", {}},
                                 {"avoid", "heading", {}}, 10, {}});
  EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, SuppressorControlTypeIsV6) {
  auto m = sim::example_model();
  m.modifiers[0].controlled_by = {"collide", "halt", {}};
  m.modules[1].layer = 1;  // keep the layer rule satisfied
  EXPECT_EQ(codes(validate(m)), std::vector<int>{6});
}

TEST(Validate, DanglingControlSuppressesDependentChecks) {
  auto m = sim::example_model();
  m.modifiers[0].controlled_by = {"ghost", "heading", {}};
  m.modules[4].layer = 5;  // would be V4 if the controller resolved
  EXPECT_EQ(codes(validate(m)), std::vector<int>{1});
}

TEST(Validate, KindMismatchSuppressesDependentChecks) {
  auto m = sim::example_model();
  m.modifiers[0].target = {"runaway", "heading", {}};
  m.modules[3].layer = 7;
  EXPECT_EQ(codes(validate(m)), std::vector<int>{9});
}

TEST(Validate, UndeclaredDataTypeIsV1) {
  auto m = sim::example_model();
  m.modules[0].outputs[0].data_type = "Nope";
  auto c = codes(validate(m));
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c[0], 1);
}

TEST(Validate, DuplicateLineAcrossDirectionsIsV2) {
  auto m = sim::example_model();
  m.modules[7].outputs[0].name = "wish";
  auto c = codes(validate(m));
  EXPECT_NE(std::find(c.begin(), c.end(), 2), c.end());
}

TEST(Validate, ReportsEverythingInOnePass) {
  auto m = sim::example_model();
  m.modifiers[0].time_ms = 0;
  m.wires.push_back(Wire{{"avoid", "heading", {}}, {"turn", "heading", {}}, {}});
  m.data_types.push_back(m.data_types[0]);
  auto c = codes(validate(m));
  std::sort(c.begin(), c.end());
  EXPECT_EQ(c, (std::vector<int>{2, 3, 7}));
}

TEST(Validate, OrderedBySourcePosition) {
  auto m = load("rules/v2_fail.sub");
  m.modifiers[0].time_ms = 0;  // keeps the span of the parsed modifier
  auto ds = validate(m);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_LT(ds[0].span->start, ds[1].span->start);
}

TEST(Validate, MessagesNameTheElements) {
  auto m = load("rules/v4_fail.sub");
  auto ds = validate(m);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_NE(ds[0].message.find("avoid.force"), std::string::npos);
  EXPECT_NE(ds[0].message.find("feelforce.force"), std::string::npos);
  EXPECT_EQ(ds[0].location, "suppressor avoid.force");
}

TEST(Validate, RuleFixturePairs) {
  for (int code = 1; code <= 9; ++code) {
    const std::string stem = "rules/v" + std::to_string(code);
    EXPECT_TRUE(validate(load(stem + "_pass.sub")).empty()) << stem;
    auto c = codes(validate(load(stem + "_fail.sub")));
    EXPECT_EQ(c, std::vector<int>{code}) << stem;
  }
}

TEST(Render, FileLineColumn) {
  auto ds = validate(load("rules/v7_fail.sub"));
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(render(ds[0], "m.sub"),
            "m.sub:49:3: error[V7]: suppressor on 'turn.heading' has non-positive time 0 ms");
}

TEST(Render, NoSpanUsesZeros) {
  Diagnostic d{DiagCode::input_fan_in, Severity::error, "msg", "wire x", std::nullopt};
  EXPECT_EQ(render(d, "f"), "f:0:0: error[V3]: msg");
}

TEST(Property, AgreesWithBruteForceWalker) {
  std::mt19937_64 rng(2024);
  int invalid = 0;
  for (int i = 0; i < 500; ++i) {
    const auto m = testing::random_mutated_model(rng);
    const auto ds = validate(m);
    EXPECT_EQ(verdicts(ds), testing::brute_force_verdicts(m)) << dsl::format(m);
    invalid += !ds.empty();
  }
  EXPECT_GT(invalid, 100);  // the generator actually breaks rules
}

TEST(Property, ValidModelsAreClean) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto m = testing::random_valid_model(rng);
    EXPECT_TRUE(validate(m).empty()) << dsl::format(m);
  }
}

TEST(Property, Deterministic) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto m = testing::random_mutated_model(rng);
    const auto a = validate(m);
    const auto b = validate(m);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(render(a[k], "f"), render(b[k], "f"));
  }
}

TEST(Property, LayerShiftKeepsLayerVerdicts) {
  std::mt19937_64 rng(13);
  auto layer_codes = [](const SystemModel& m) {
    testing::Verdicts v;
    for (const auto& d : validate(m)) {
      if (d.code == DiagCode::suppressor_layer || d.code == DiagCode::inhibitor_layer) {
        v.insert({static_cast<int>(d.code), d.location});
      }
    }
    return v;
  };
  for (int i = 0; i < 200; ++i) {
    auto m = testing::random_mutated_model(rng);
    const auto before = layer_codes(m);
    const std::uint32_t shift = 1 + static_cast<std::uint32_t>(rng() % 1000);
    for (auto& mod : m.modules) mod.layer += shift;
    EXPECT_EQ(layer_codes(m), before);
  }
}

}  // namespace
}  // namespace subsum
