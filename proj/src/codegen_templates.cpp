#include "codegen_templates.hpp"

namespace subsum::codegen::templates {

const std::string_view module_header = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include <subsum/metamodel.hpp>
#include <subsum/runtime.hpp>

#include "../types.hpp"

namespace {{project}}::modules::{{module_id}} {

{{#doc}}
/// {{line}}
{{/doc}}
/// Level of competence: {{layer}}.
inline constexpr std::string_view module_name = "{{module}}";
inline constexpr std::uint32_t layer = {{layer}};

/// Line names as declared in the model.
namespace lines {
{{#inputs}}
/// Input `{{name}}` carrying {{type}}.{{#description}} {{description}}{{/description}}
inline constexpr std::string_view {{id}} = "{{name}}";
{{/inputs}}
{{#outputs}}
/// Output `{{name}}` carrying {{type}}.{{#description}} {{description}}{{/description}}
inline constexpr std::string_view {{id}} = "{{name}}";
{{/outputs}}
}  // namespace lines

/// Qualified `module.line` names, for inject/probe taps.
namespace qualified {
{{#inputs}}
inline constexpr std::string_view {{id}} = "{{module}}.{{name}}";
{{/inputs}}
{{#outputs}}
inline constexpr std::string_view {{id}} = "{{module}}.{{name}}";
{{/outputs}}
}  // namespace qualified

/// Typed view of the module's lines for one dispatch.
class Io {
 public:
  explicit Io(subsum::rt::StepContext& ctx) : ctx_(ctx) {}

{{#inputs}}
  /// Latest value on `{{name}}`; reading acknowledges it.
  std::optional<types::{{type_id}}> read_{{id}}() {
    return ctx_.read_as<types::{{type_id}}>(lines::{{id}});
  }
  /// True when `{{name}}` holds a value not yet read.
  bool fresh_{{id}}() const { return ctx_.fresh(lines::{{id}}); }

{{/inputs}}
{{#outputs}}
  /// Sends a message on `{{name}}`.
  void emit_{{id}}(const types::{{type_id}}& value) { ctx_.emit(lines::{{id}}, value); }

{{/outputs}}
  std::int64_t now() const { return ctx_.now(); }
  void request_wakeup(std::int64_t delay_ms) { ctx_.request_wakeup(delay_ms); }
  std::uint64_t seed() const { return ctx_.seed(); }
  subsum::rt::StepContext& context() { return ctx_; }

 private:
  subsum::rt::StepContext& ctx_;
};

/// The module's declaration, as modeled.
subsum::ModuleDecl declaration();

/// AFSM host for `{{module}}`. State lives in members; the body of
/// on_step() is the module's program.
class Behavior final : public subsum::rt::ModuleBehavior {
 public:
  void step(subsum::rt::StepContext& ctx) override;

 private:
  void on_step(Io& io);

  // USER CODE BEGIN {{module}}.members
{{members}}
  // USER CODE END {{module}}.members
};

std::unique_ptr<subsum::rt::ModuleBehavior> make_behavior();

}  // namespace {{project}}::modules::{{module_id}}
)";

const std::string_view module_source = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#include "{{module_id}}.hpp"

#include <string>

// USER CODE BEGIN {{module}}.includes
{{includes}}
// USER CODE END {{module}}.includes

namespace {{project}}::modules::{{module_id}} {

subsum::ModuleDecl declaration() {
  subsum::ModuleDecl decl;
  decl.name = std::string(module_name);
  decl.description = {{description_literal}};
  decl.layer = layer;
{{#inputs}}
  decl.inputs.push_back(subsum::LineDecl{std::string(lines::{{id}}), {{description_literal}}, "{{type}}", std::nullopt});
{{/inputs}}
{{#outputs}}
  decl.outputs.push_back(subsum::LineDecl{std::string(lines::{{id}}), {{description_literal}}, "{{type}}", std::nullopt});
{{/outputs}}
  return decl;
}

void Behavior::step(subsum::rt::StepContext& ctx) {
  Io io(ctx);
  on_step(io);
}

void Behavior::on_step(Io& io) {
  // USER CODE BEGIN {{module}}.step
{{body}}
  // USER CODE END {{module}}.step
}

std::unique_ptr<subsum::rt::ModuleBehavior> make_behavior() {
  return std::make_unique<Behavior>();
}

}  // namespace {{project}}::modules::{{module_id}}
)";

const std::string_view types_header = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#pragma once

#include <string_view>

// USER CODE BEGIN types.includes
{{includes}}
// USER CODE END types.includes

namespace {{project}}::types {

/// Maps a payload type to the data type token it travels under.
template <typename T>
struct type_token;

{{#types}}
{{#doc}}
/// {{line}}
{{/doc}}
struct {{type_id}} {
  // USER CODE BEGIN types.{{type}}
{{body}}
  // USER CODE END types.{{type}}
};

template <>
struct type_token<{{type_id}}> {
  static constexpr std::string_view value = "{{type}}";
};

{{/types}}
// USER CODE BEGIN types.extra
{{extra}}
// USER CODE END types.extra

}  // namespace {{project}}::types
)";

const std::string_view system_header = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#pragma once

#include <subsum/metamodel.hpp>
#include <subsum/runtime.hpp>

namespace {{project}} {

/// The system model, built in declaration order.
subsum::SystemModel make_model();

/// One behavior per module, keyed by module name.
subsum::rt::BehaviorMap make_behaviors();

}  // namespace {{project}}
)";

const std::string_view system_source = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#include "system.hpp"

#include <cstdint>
#include <string>

{{#modules}}
#include "modules/{{module_id}}.hpp"
{{/modules}}

namespace {{project}} {
namespace {

[[maybe_unused]] subsum::Wire wire(const char* source_module, const char* source_line,
                                   const char* sink_module, const char* sink_line) {
  subsum::Wire w;
  w.source = subsum::LineRef{source_module, source_line, std::nullopt};
  w.sink = subsum::LineRef{sink_module, sink_line, std::nullopt};
  return w;
}

[[maybe_unused]] subsum::Modifier modifier(subsum::ModifierKind kind, const char* target_module,
                                           const char* target_line, const char* control_module,
                                           const char* control_line, std::int64_t time_ms) {
  subsum::Modifier m;
  m.kind = kind;
  m.target = subsum::LineRef{target_module, target_line, std::nullopt};
  m.controlled_by = subsum::LineRef{control_module, control_line, std::nullopt};
  m.time_ms = time_ms;
  return m;
}

}  // namespace

subsum::SystemModel make_model() {
  subsum::SystemModel model;
  model.name = "{{system}}";
  model.description = {{description_literal}};
{{#types}}
  model.data_types.push_back(subsum::DataTypeDecl{"{{type}}", {{description_literal}}, std::nullopt});
{{/types}}
{{#modules}}
  model.modules.push_back(modules::{{module_id}}::declaration());
{{/modules}}
{{#wires}}
  model.wires.push_back(wire("{{source_module}}", "{{source_line}}", "{{sink_module}}", "{{sink_line}}"));
{{/wires}}
{{#modifiers}}
  model.modifiers.push_back(modifier(subsum::ModifierKind::{{kind}}, "{{target_module}}", "{{target_line}}",
                                     "{{control_module}}", "{{control_line}}", {{time_ms}}));
{{/modifiers}}
  return model;
}

subsum::rt::BehaviorMap make_behaviors() {
  subsum::rt::BehaviorMap behaviors;
{{#modules}}
  behaviors.emplace(std::string(modules::{{module_id}}::module_name), modules::{{module_id}}::make_behavior());
{{/modules}}
  return behaviors;
}

}  // namespace {{project}}
)";

const std::string_view main_source = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <subsum/runtime.hpp>

#include "system.hpp"

// USER CODE BEGIN main.includes
{{includes}}
// USER CODE END main.includes

namespace {

struct Options {
  std::int64_t ticks = {{default_ticks}};
  std::uint64_t seed = 0;
  std::optional<std::set<std::uint32_t>> layers;
  std::string trace_csv;
  bool dump_wires = false;
};

void usage(std::ostream& os) {
  os << "usage: {{project}} [TICKS] [--seed S] [--layers L1,L2] [--trace FILE] [--dump-wires]\n";
}

bool parse_layers(std::string_view text, std::set<std::uint32_t>& out) {
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) return false;
    try {
      out.insert(static_cast<std::uint32_t>(std::stoul(item)));
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

bool parse_args(int argc, char** argv, Options& opts) {
  for (int i = 1; i < argc; ++i) {
    std::string_view arg = argv[i];
    auto value = [&]() -> const char* { return i + 1 < argc ? argv[++i] : nullptr; };
    try {
      if (arg == "--seed") {
        const char* v = value();
        if (!v) return false;
        opts.seed = std::stoull(v);
      } else if (arg == "--layers") {
        const char* v = value();
        std::set<std::uint32_t> layers;
        if (!v || !parse_layers(v, layers)) return false;
        opts.layers = layers;
      } else if (arg == "--trace") {
        const char* v = value();
        if (!v) return false;
        opts.trace_csv = v;
      } else if (arg == "--dump-wires") {
        opts.dump_wires = true;
      } else if (!arg.empty() && arg[0] != '-') {
        opts.ticks = std::stoll(std::string(arg));
      } else {
        return false;
      }
    } catch (const std::exception&) {
      return false;
    }
  }
  return opts.ticks >= 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opts;
  if (!parse_args(argc, argv, opts)) {
    usage(std::cerr);
    return 2;
  }

  const subsum::SystemModel model = {{project}}::make_model();
  if (opts.dump_wires) {
    for (const auto& w : model.wires) {
      std::cout << "wire " << w.source.str() << " -> " << w.sink.str() << "\n";
    }
    for (const auto& m : model.modifiers) {
      std::cout << (m.kind == subsum::ModifierKind::suppressor ? "suppress " : "inhibit ")
                << m.target.str() << " by " << m.controlled_by.str() << " for " << m.time_ms
                << " ms\n";
    }
    return 0;
  }

  subsum::rt::RuntimeConfig config;
  config.seed = opts.seed;
  config.enabled_layers = opts.layers;

  // USER CODE BEGIN main.setup
{{setup}}
  // USER CODE END main.setup

  try {
    auto runtime = subsum::rt::Runtime::instantiate(model, {{project}}::make_behaviors(), config);
    runtime.run_until(opts.ticks * config.tick_ms);
    std::cout << "{{system}}: ran " << opts.ticks << " ticks, " << runtime.trace().size()
              << " events\n";
    if (!opts.trace_csv.empty()) {
      std::ofstream out(opts.trace_csv, std::ios::binary);
      out << subsum::rt::to_csv(runtime.trace());
      if (!out) {
        std::cerr << "cannot write " << opts.trace_csv << "\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "{{system}}: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
)";

const std::string_view manifest = R"(# Generated by subsum from system '{{system}}'.
# Edit only inside USER CODE regions; everything else is rewritten on regeneration.
# subsum-checksum: {{checksum}}
cmake_minimum_required(VERSION 3.20)
project({{project}} LANGUAGES CXX)

set(CMAKE_CXX_STANDARD 20)
set(CMAKE_CXX_STANDARD_REQUIRED ON)

# Point subsum_DIR at a subsum build or install tree.
find_package(subsum REQUIRED)

# USER CODE BEGIN manifest.setup
{{setup}}
# USER CODE END manifest.setup

add_library({{project}}_types INTERFACE)
target_include_directories({{project}}_types INTERFACE ${CMAKE_CURRENT_SOURCE_DIR}/src)
target_link_libraries({{project}}_types INTERFACE subsum::runtime)

# One object library per module: each unit builds without its siblings.
{{#modules}}
add_library({{project}}_module_{{module_id}} OBJECT src/modules/{{module_id}}.cpp)
target_link_libraries({{project}}_module_{{module_id}} PUBLIC {{project}}_types)
{{/modules}}

add_library({{project}}_system STATIC src/system.cpp
{{#modules}}
  $<TARGET_OBJECTS:{{project}}_module_{{module_id}}>
{{/modules}}
)
target_link_libraries({{project}}_system PUBLIC {{project}}_types)

add_executable({{project}} src/main.cpp)
target_link_libraries({{project}} PRIVATE {{project}}_system)
{{#emit_tests}}

enable_testing()
add_executable({{project}}_tests tests/test_main.cpp
{{#modules}}
  tests/test_{{module_id}}.cpp
{{/modules}}
)
target_link_libraries({{project}}_tests PRIVATE {{project}}_system)
add_test(NAME {{project}}_tests COMMAND {{project}}_tests)
{{/emit_tests}}

# USER CODE BEGIN manifest.link
{{link}}
# USER CODE END manifest.link
)";

const std::string_view module_test = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#include <iostream>

#include <subsum/runtime.hpp>

#include "../src/modules/{{module_id}}.hpp"
#include "../src/system.hpp"

namespace {{project}}::tests {

/// Drives `{{module}}` through inject/probe taps on the full system.
bool test_{{module_id}}() {
  auto runtime = subsum::rt::Runtime::instantiate(make_model(), make_behaviors());
{{#outputs}}
  auto {{id}}_probe = runtime.probe(modules::{{module_id}}::qualified::{{id}});
{{/outputs}}
  bool ok = true;
  // USER CODE BEGIN test.{{module}}
{{body}}
  // USER CODE END test.{{module}}
{{#outputs}}
  std::cout << "  {{module}}.{{name}}: " << {{id}}_probe.size() << " message(s)\n";
{{/outputs}}
  return ok;
}

}  // namespace {{project}}::tests
)";

const std::string_view test_main = R"(// Generated by subsum from system '{{system}}'.
// Edit only inside USER CODE regions; everything else is rewritten on regeneration.
// subsum-checksum: {{checksum}}
#include <exception>
#include <iostream>

namespace {{project}}::tests {
{{#modules}}
bool test_{{module_id}}();
{{/modules}}
}  // namespace {{project}}::tests

int main() {
  struct Case {
    const char* name;
    bool (*fn)();
  };
  const Case cases[] = {
{{#modules}}
      {"{{module}}", &{{project}}::tests::test_{{module_id}}},
{{/modules}}
      {nullptr, nullptr},
  };
  int failed = 0;
  for (const Case& c : cases) {
    if (!c.fn) break;
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::cerr << c.name << ": " << e.what() << "\n";
    }
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << "\n";
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
)";

const std::string_view doc_index = R"(<!-- Generated by subsum from system '{{system}}'. -->
<!-- subsum-checksum: {{checksum}} -->
# System `{{system}}`

{{description_text}}

## Layers

| Layer | Modules |
|---|---|
{{#layers}}
| {{layer}} | {{modules}} |
{{/layers}}

## Modules

{{#modules}}
- [`{{module}}`]({{module_id}}.md) (layer {{layer}}): {{summary}}
{{/modules}}
{{^modules}}
(no modules)
{{/modules}}

## Data types

{{#types}}
- `{{type}}`: {{summary}}
{{/types}}
{{^types}}
(no data types)
{{/types}}

## Wires

{{#wires}}
- `{{source}}` -> `{{sink}}`
{{/wires}}
{{^wires}}
(no wires)
{{/wires}}

## Suppressors and inhibitors

{{#modifiers}}
- {{kind}} on `{{target}}`, controlled by `{{control}}`, {{time_ms}} ms
{{/modifiers}}
{{^modifiers}}
(none)
{{/modifiers}}

## Generated names

Model identifiers are turned into C++ names by splitting camelCase words,
lowercasing, joining with `_`, and appending `_` to C++ keywords. Clashes get
a numeric suffix.

| Model name | C++ name |
|---|---|
{{#names}}
| `{{model}}` | `{{cpp}}` |
{{/names}}
)";

const std::string_view doc_module = R"(<!-- Generated by subsum from system '{{system}}'. -->
<!-- subsum-checksum: {{checksum}} -->
# Module `{{module}}`

Layer: {{layer}}

{{description_text}}

## Lines

| Direction | Name | Type | Description |
|---|---|---|---|
{{#inputs}}
| in | `{{name}}` | `{{type}}` | {{summary}} |
{{/inputs}}
{{#outputs}}
| out | `{{name}}` | `{{type}}` | {{summary}} |
{{/outputs}}

## Wiring

| Line | Connected to |
|---|---|
{{#wiring}}
| `{{line}}` | {{peer}} |
{{/wiring}}
{{^wiring}}
| - | (unconnected) |
{{/wiring}}

## Interception

{{#interception}}
- {{text}}
{{/interception}}
{{^interception}}
(none)
{{/interception}}
)";

}  // namespace subsum::codegen::templates
