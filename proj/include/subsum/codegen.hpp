#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/metamodel.hpp"
#include "subsum/validate.hpp"

namespace subsum::codegen {

/// Relative `/`-separated path -> file content (always newline-terminated).
using FileSet = std::map<std::string, std::string>;

struct GenOptions {
  std::optional<std::string> project_name;  // default: system name
  bool emit_sources = true;
  bool emit_docs = false;
  bool emit_tests = false;
  bool overwrite_user_regions = false;
};

class GenError : public std::runtime_error {
 public:
  enum class Kind { invalid_model, invalid_options, io_conflict };

  GenError(Kind kind, std::string message, std::vector<Diagnostic> diagnostics = {})
      : std::runtime_error(std::move(message)), kind(kind), diagnostics(std::move(diagnostics)) {}

  Kind kind;
  std::vector<Diagnostic> diagnostics;
};

/// Fresh skeleton for a valid model. Pure: same inputs, same bytes.
FileSet generate(const SystemModel& model, const GenOptions& opts = {});

/// Markdown pages only.
FileSet generate_docs(const SystemModel& model);

/// Deterministic identifier sanitizer used for every generated C++ name:
/// camelCase split into words, lowercased, `_`-joined, C++ keywords get a
/// trailing `_`.
std::string mangle(std::string_view identifier);

// -- user regions -----------------------------------------------------------

inline constexpr std::string_view kRegionBegin = "USER CODE BEGIN ";
inline constexpr std::string_view kRegionEnd = "USER CODE END ";

struct Region {
  std::string id;
  std::string body;       // lines between the markers, newline-terminated
  std::size_t begin_line;  // 1-based line of the BEGIN marker
};

/// Regions of one file in order. Throws GenError(io_conflict) on unbalanced
/// or duplicated markers.
std::vector<Region> find_regions(std::string_view content);

/// Value recorded in a file's `subsum-checksum:` line, if any.
std::optional<std::string> recorded_checksum(std::string_view content);

/// Checksum over everything outside region bodies, ignoring the checksum line.
std::string scaffold_checksum(std::string_view content);

struct Conflict {
  std::string path;
  std::string summary;
};

struct MergeResult {
  FileSet files;                         // what should be on disk
  std::vector<Conflict> conflicts;       // manual edits outside regions
  std::vector<std::string> orphaned;     // "path: region" dropped from existing files
  std::vector<std::string> changed;      // paths whose content differs from `existing`
};

/// Carries user-region bodies from `existing` into `fresh`. A file whose
/// scaffold no longer matches its recorded checksum is a conflict; with
/// `force` the fresh scaffold replaces it anyway.
MergeResult merge(const FileSet& fresh, const FileSet& existing, bool overwrite_user_regions,
                  bool force = false);

/// Lines that are neither blank nor comment-only, for a C++ or CMake file.
std::size_t count_code_lines(std::string_view content);
/// Lines inside user regions (markers excluded).
std::size_t count_region_lines(std::string_view content);

// -- diagram ----------------------------------------------------------------

/// Graphviz rendering: modules as boxes clustered by layer, wires as edges,
/// modifiers as `S`/`I` circles with their time.
std::string to_dot(const SystemModel& model);

}  // namespace subsum::codegen
