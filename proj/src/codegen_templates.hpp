#pragma once

#include <string_view>

namespace subsum::codegen::templates {

// Module interface: typed line names and accessors.
extern const std::string_view module_header;
// Module body: declaration, step glue, AFSM stub region.
extern const std::string_view module_source;
// Data type placeholders.
extern const std::string_view types_header;
// Main task: model construction, behavior registration, driver.
extern const std::string_view system_header;
extern const std::string_view system_source;
extern const std::string_view main_source;
extern const std::string_view manifest;
// Test stubs.
extern const std::string_view module_test;
extern const std::string_view test_main;
// Documentation.
extern const std::string_view doc_index;
extern const std::string_view doc_module;

}  // namespace subsum::codegen::templates
