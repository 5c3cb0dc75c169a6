#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/metamodel.hpp"

namespace subsum {

/// Stable constraint codes. The numeric value is the `n` in `Vn`.
enum class DiagCode {
  dangling_reference = 1,   // V1
  duplicate_name = 2,       // V2
  input_fan_in = 3,         // V3
  suppressor_layer = 4,     // V4
  inhibitor_layer = 5,      // V5
  type_mismatch = 6,        // V6
  non_positive_time = 7,    // V7
  stacked_modifiers = 8,    // V8
  kind_target_mismatch = 9, // V9
};

enum class Severity { error, warning };

struct Diagnostic {
  DiagCode code;
  Severity severity = Severity::error;
  std::string message;
  std::string location;  // model path, e.g. "module runaway / input force"
  std::optional<SourceSpan> span;
};

/// "V1" .. "V9"
std::string code_name(DiagCode code);
std::string_view severity_name(Severity severity);

/// Every finding in one pass, ordered by source position when the model
/// carries spans (parser output), else by declaration order.
std::vector<Diagnostic> validate(const SystemModel& model);

/// `FILE:LINE:COL: error[Vn]: message`; `0:0` when the element has no span.
std::string render(const Diagnostic& diag, std::string_view file);

}  // namespace subsum
