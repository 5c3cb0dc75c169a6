#include "subsum/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "subsum/codegen.hpp"
#include "subsum/dsl.hpp"
#include "subsum/sim/simulator.hpp"
#include "subsum/validate.hpp"

#ifndef SUBSUM_VERSION
#define SUBSUM_VERSION "0.0.0"
#endif

namespace subsum::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kErrors = 1;
constexpr int kUsage = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "subsum: cannot read " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const fs::path& path, std::string_view content, std::ostream& err) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) {
    err << "subsum: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

void print_parse_errors(const std::string& file, const dsl::ParseResult& r, std::ostream& err) {
  for (const auto& e : r.errors) {
    err << file << ":" << e.span.line << ":" << e.span.column << ": error[syntax]: " << e.message << "\n";
  }
}

/// Parses and validates; prints problems. Returns the model when clean.
std::optional<SystemModel> load_model(const std::string& file, const std::string& text,
                                      std::ostream& err) {
  auto parsed = dsl::parse(text);
  if (!parsed.ok()) {
    print_parse_errors(file, parsed, err);
    return std::nullopt;
  }
  auto diags = validate(*parsed.model);
  for (const auto& d : diags) err << render(d, file) << "\n";
  if (!diags.empty()) return std::nullopt;
  return std::move(*parsed.model);
}

int cmd_check(const std::string& file, Streams io) {
  auto text = read_file(file, io.err);
  if (!text) return kUsage;
  if (!load_model(file, *text, io.err)) return kErrors;
  io.out << file << ": ok\n";
  return kOk;
}

int cmd_fmt(const std::string& file, bool write, bool check, Streams io) {
  auto text = read_file(file, io.err);
  if (!text) return kUsage;
  auto parsed = dsl::parse(*text);
  if (!parsed.ok()) {
    print_parse_errors(file, parsed, io.err);
    return kUsage;
  }
  const std::string formatted = dsl::format(*parsed.model);
  if (check) {
    if (formatted != *text) {
      io.err << file << ": not canonically formatted\n";
      return kErrors;
    }
    return kOk;
  }
  if (write) {
    if (formatted != *text && !write_file(file, formatted, io.err)) return kUsage;
    return kOk;
  }
  io.out << formatted;
  return kOk;
}

struct GenArgs {
  std::string file;
  std::string out_dir;
  bool docs = false;
  bool tests = false;
  bool force = false;
  bool overwrite_regions = false;
  std::optional<std::string> project;
};

int cmd_gen(const GenArgs& a, Streams io) {
  auto text = read_file(a.file, io.err);
  if (!text) return kUsage;
  auto model = load_model(a.file, *text, io.err);
  if (!model) return kErrors;

  codegen::GenOptions opts;
  opts.emit_docs = a.docs;
  opts.emit_tests = a.tests;
  opts.project_name = a.project;
  codegen::FileSet fresh;
  try {
    fresh = codegen::generate(*model, opts);
  } catch (const codegen::GenError& e) {
    io.err << "subsum: " << e.what() << "\n";
    return e.kind == codegen::GenError::Kind::invalid_model ? kErrors : kUsage;
  }

  const fs::path root(a.out_dir);
  codegen::FileSet existing;
  for (const auto& [path, _] : fresh) {
    const fs::path p = root / path;
    if (!fs::exists(p)) continue;
    auto content = read_file(p.string(), io.err);
    if (!content) return kUsage;
    existing[path] = std::move(*content);
  }
  auto merged = codegen::merge(fresh, existing, a.overwrite_regions, a.force);
  if (!merged.conflicts.empty() && !a.force) {
    for (const auto& c : merged.conflicts) {
      io.err << (root / c.path).string() << ": error[io-conflict]: " << c.summary << "\n";
    }
    io.err << "subsum: nothing written; rerun with --force to overwrite\n";
    return kUsage;
  }
  for (const auto& o : merged.orphaned) io.err << "subsum: warning: dropped region " << o << "\n";

  // Stage everything first so a failed write leaves the tree untouched.
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    io.err << "subsum: cannot create " << root.string() << ": " << ec.message() << "\n";
    return kUsage;
  }
  std::random_device rd;
  const fs::path stage = root / (".subsum-stage-" + std::to_string(rd()));
  auto cleanup = [&] { fs::remove_all(stage, ec); };
  for (const auto& path : merged.changed) {
    if (!write_file(stage / path, merged.files.at(path), io.err)) {
      cleanup();
      return kUsage;
    }
  }
  for (const auto& path : merged.changed) {
    fs::create_directories((root / path).parent_path(), ec);
    fs::rename(stage / path, root / path, ec);
    if (ec) {
      io.err << "subsum: cannot move " << path << " into place: " << ec.message() << "\n";
      cleanup();
      return kUsage;
    }
  }
  cleanup();

  std::set<std::string> changed(merged.changed.begin(), merged.changed.end());
  for (const auto& [path, _] : merged.files) {
    io.out << (changed.count(path) ? "wrote     " : "unchanged ") << (root / path).string() << "\n";
  }
  return kOk;
}

int cmd_dot(const std::string& file, const std::string& out_file, Streams io) {
  auto text = read_file(file, io.err);
  if (!text) return kUsage;
  auto model = load_model(file, *text, io.err);
  if (!model) return kErrors;
  const std::string dot = codegen::to_dot(*model);
  if (out_file.empty()) {
    io.out << dot;
    return kOk;
  }
  return write_file(out_file, dot, io.err) ? kOk : kUsage;
}

struct SimArgs {
  std::string world;
  std::int64_t ticks = 10'000;
  std::string layers;
  std::uint64_t seed = 0;
  std::string csv;
  std::string svg;
  std::string trace;
  std::string params;
  bool compare = false;
};

std::optional<std::set<std::uint32_t>> parse_layers(const std::string& text) {
  std::set<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != item.size() || v > UINT32_MAX) return std::nullopt;
    out.insert(static_cast<std::uint32_t>(v));
  }
  if (out.empty()) return std::nullopt;
  return out;
}

int cmd_sim(const SimArgs& a, Streams io) {
  auto text = read_file(a.world, io.err);
  if (!text) return kUsage;
  sim::World world;
  try {
    world = sim::load_world(*text);
  } catch (const sim::WorldError& e) {
    io.err << a.world << ": error[world]: " << e.what() << "\n";
    return kUsage;
  }
  if (a.ticks < 0) {
    io.err << "subsum: --ticks must not be negative\n";
    return kUsage;
  }
  sim::SimConfig config;
  if (!a.params.empty()) {
    auto params = read_file(a.params, io.err);
    if (!params) return kUsage;
    try {
      sim::apply_params(*params, config);
    } catch (const sim::WorldError& e) {
      io.err << a.params << ": error[params]: " << e.what() << "\n";
      return kUsage;
    }
  }
  config.ticks = a.ticks;
  config.runtime.seed = a.seed;
  if (!a.layers.empty()) {
    auto layers = parse_layers(a.layers);
    if (!layers) {
      io.err << "subsum: --layers expects a comma-separated list of layer numbers\n";
      return kUsage;
    }
    config.runtime.enabled_layers = *layers;
  }

  try {
    if (a.compare) {
      auto low_cfg = config;
      low_cfg.runtime.enabled_layers = std::set<std::uint32_t>{0};
      auto both_cfg = config;
      both_cfg.runtime.enabled_layers.reset();
      const auto low = sim::run_sim(world, low_cfg);
      const auto both = sim::run_sim(world, both_cfg);
      io.out << "layer 0:      coverage_cells " << low.coverage_cells << ", collisions "
             << low.collisions << "\n";
      io.out << "layers 0,1:   coverage_cells " << both.coverage_cells << ", collisions "
             << both.collisions << "\n";
      if (!a.svg.empty() &&
          !write_file(a.svg,
                      sim::render_svg(world, {{&low.path, "#9be59b", "layer 0"},
                                              {&both.path, "#1a7f1a", "layers 0,1"}}),
                      io.err)) {
        return kUsage;
      }
      if (!a.csv.empty() && !write_file(a.csv, sim::path_csv(both.path), io.err)) return kUsage;
      if (!a.trace.empty() && !write_file(a.trace, rt::to_csv(both.trace), io.err)) return kUsage;
      return kOk;
    }

    const auto result = sim::run_sim(world, config);
    io.out << "coverage_cells: " << result.coverage_cells << "\n";
    io.out << "collisions: " << result.collisions << "\n";
    if (!a.csv.empty() && !write_file(a.csv, sim::path_csv(result.path), io.err)) return kUsage;
    if (!a.svg.empty() &&
        !write_file(a.svg, sim::render_svg(world, {{&result.path, "#1a7f1a", ""}}), io.err)) {
      return kUsage;
    }
    if (!a.trace.empty() && !write_file(a.trace, rt::to_csv(result.trace), io.err)) return kUsage;
  } catch (const rt::InstantiateError& e) {
    io.err << "subsum: " << e.what() << "\n";
    return kUsage;
  } catch (const rt::RuntimeError& e) {
    io.err << "subsum: " << e.what() << "\n";
    return kErrors;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design, check, generate, and simulate subsumption control systems.", "subsum"};
  app.set_version_flag("--version", SUBSUM_VERSION);
  app.require_subcommand(1);

  std::string file;
  auto* check = app.add_subcommand("check", "Parse and validate a model");
  check->add_option("file", file, "Model file (.sub)")->required();

  bool fmt_write = false;
  bool fmt_check = false;
  auto* fmt = app.add_subcommand("fmt", "Print, rewrite, or check canonical formatting");
  fmt->add_option("file", file, "Model file (.sub)")->required();
  auto* w = fmt->add_flag("--write", fmt_write, "Rewrite the file in place");
  fmt->add_flag("--check", fmt_check, "Exit 1 when the file is not canonical")->excludes(w);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a C++ project skeleton");
  gen->add_option("file", gen_args.file, "Model file (.sub)")->required();
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--project", gen_args.project, "C++ project name (default: system name)");
  gen->add_flag("--docs", gen_args.docs, "Also emit markdown documentation");
  gen->add_flag("--tests", gen_args.tests, "Also emit per-module test stubs");
  gen->add_flag("--force", gen_args.force,
                "Regenerate files edited outside user regions, keeping region bodies");
  gen->add_flag("--overwrite-regions", gen_args.overwrite_regions, "Reset user regions to their stubs");

  std::string dot_out;
  auto* dot = app.add_subcommand("dot", "Export a Graphviz diagram");
  dot->add_option("file", file, "Model file (.sub)")->required();
  dot->add_option("--out", dot_out, "Output file (default: stdout)");

  SimArgs sim_args;
  auto* simc = app.add_subcommand("sim", "Run the example controller in a world");
  simc->add_option("world", sim_args.world, "World file (.json)")->required();
  simc->add_option("--ticks", sim_args.ticks, "Runtime ticks to simulate")->capture_default_str();
  simc->add_option("--layers", sim_args.layers, "Enabled layers, e.g. 0 or 0,1 (default: all)");
  simc->add_option("--seed", sim_args.seed, "Runtime seed")->capture_default_str();
  simc->add_option("--csv", sim_args.csv, "Write the path as t_ms,x,y");
  simc->add_option("--svg", sim_args.svg, "Write an SVG plot");
  simc->add_option("--trace", sim_args.trace, "Write the runtime trace CSV");
  simc->add_option("--params", sim_args.params, "Controller and sensor parameters (.json)");
  simc->add_flag("--compare", sim_args.compare, "Run layer 0 alone and both layers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SUBSUM_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "subsum: " << e.what() << "\n";
    err << "Run with --help for more information.\n";
    return kUsage;
  }

  Streams io{out, err};
  if (*check) return cmd_check(file, io);
  if (*fmt) return cmd_fmt(file, fmt_write, fmt_check, io);
  if (*gen) return cmd_gen(gen_args, io);
  if (*dot) return cmd_dot(file, dot_out, io);
  if (*simc) return cmd_sim(sim_args, io);
  return kUsage;
}

}  // namespace subsum::cli
