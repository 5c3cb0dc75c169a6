#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

#include "subsum/codegen.hpp"

namespace subsum::testing {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string fixture(const std::string& name) { return read_file(fs::path(SUBSUM_FIXTURES) / name); }

inline void write_files(const fs::path& root, const codegen::FileSet& files) {
  for (const auto& [path, content] : files) write_file(root / path, content);
}

/// Fresh scratch directory under the build tree.
inline fs::path scratch(const std::string& name) {
  auto p = fs::path(SUBSUM_BUILD_DIR) / "scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CommandResult {
  int status = -1;
  std::string output;
};

/// Runs a shell command, capturing stdout and stderr together.
inline CommandResult run_command(const std::string& cmd, const fs::path& log) {
  const std::string full = cmd + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(full.c_str());
  CommandResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.output = fs::exists(log) ? read_file(log) : "";
  return r;
}

/// Configures and builds a generated project against this build tree.
inline CommandResult build_project(const fs::path& src, const fs::path& build) {
  const std::string cmake = SUBSUM_CMAKE;
  auto r = run_command("'" + cmake + "' -S '" + src.string() + "' -B '" + build.string() +
                           "' -DCMAKE_BUILD_TYPE=Release -DCMAKE_CXX_COMPILER='" SUBSUM_CXX "' -Dsubsum_DIR='" +
                           std::string(SUBSUM_BUILD_DIR) + "'",
                       build.string() + ".configure.log");
  if (r.status != 0) return r;
  return run_command("'" + cmake + "' --build '" + build.string() + "' -j 4", build.string() + ".build.log");
}

}  // namespace subsum::testing
