#include "subsum/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace subsum {
namespace {

class Checker {
 public:
  explicit Checker(const SystemModel& model) : model_(model) {}

  std::vector<Diagnostic> run() {
    check_types();
    check_modules();
    check_wires();
    check_modifiers();
    const bool all_located = std::all_of(out_.begin(), out_.end(),
                                         [](const Diagnostic& d) { return d.span.has_value(); });
    if (all_located) {
      std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.span->start < b.span->start;
      });
    }
    return std::move(out_);
  }

 private:
  void report(DiagCode code, std::string message, std::string location,
              const std::optional<SourceSpan>& span) {
    out_.push_back(Diagnostic{code, Severity::error, std::move(message), std::move(location), span});
  }

  static std::string q(std::string_view s) { return "'" + std::string(s) + "'"; }

  void check_types() {
    std::set<std::string> seen;
    for (const auto& t : model_.data_types) {
      if (!seen.insert(t.name).second) {
        report(DiagCode::duplicate_name, "data type " + q(t.name) + " is declared more than once",
               "type " + t.name, t.span);
      }
    }
  }

  void check_modules() {
    std::set<std::string> seen;
    for (const auto& m : model_.modules) {
      if (!seen.insert(m.name).second) {
        report(DiagCode::duplicate_name, "module " + q(m.name) + " is declared more than once",
               "module " + m.name, m.span);
      }
      std::set<std::string> lines;
      auto check_line = [&](const LineDecl& l, std::string_view dir) {
        const std::string where = "module " + m.name + " / " + std::string(dir) + " " + l.name;
        if (!lines.insert(l.name).second) {
          report(DiagCode::duplicate_name,
                 "line " + q(l.name) + " is declared more than once in module " + q(m.name), where,
                 l.span);
        }
        if (!find_data_type(model_, l.data_type)) {
          report(DiagCode::dangling_reference,
                 "line " + q(m.name + "." + l.name) + " uses undeclared data type " + q(l.data_type),
                 where, l.span);
        }
      };
      for (const auto& l : m.inputs) check_line(l, "input");
      for (const auto& l : m.outputs) check_line(l, "output");
    }
  }

  // Resolves `ref` and reports V1 when it is missing or points the wrong way.
  std::optional<ResolvedLine> endpoint(const LineRef& ref, LineDirection want,
                                       std::string_view role, const std::string& where) {
    auto r = resolve(model_, ref);
    const std::string dir = want == LineDirection::input ? "input" : "output";
    if (!r) {
      report(DiagCode::dangling_reference,
             std::string(role) + " " + q(ref.str()) + " does not name a declared line", where,
             ref.span);
      return std::nullopt;
    }
    if (r->direction != want) {
      report(DiagCode::dangling_reference,
             std::string(role) + " " + q(ref.str()) + " must be an " + dir + " line", where,
             ref.span);
      return std::nullopt;
    }
    return r;
  }

  void check_wires() {
    std::set<std::pair<std::string, std::string>> sinks;
    for (const auto& w : model_.wires) {
      const std::string where = "wire " + w.source.str() + " -> " + w.sink.str();
      auto src = endpoint(w.source, LineDirection::output, "wire source", where);
      auto dst = endpoint(w.sink, LineDirection::input, "wire sink", where);
      if (dst && !sinks.insert({w.sink.module, w.sink.line}).second) {
        report(DiagCode::input_fan_in,
               "input " + q(w.sink.str()) + " is wired to more than one output (again from " +
                   q(w.source.str()) + ")",
               where, w.span);
      }
      if (src && dst && src->line->data_type != dst->line->data_type) {
        report(DiagCode::type_mismatch,
               "wire " + q(w.source.str()) + " (" + src->line->data_type + ") -> " +
                   q(w.sink.str()) + " (" + dst->line->data_type + ") connects different data types",
               where, w.span);
      }
    }
  }

  void check_modifiers() {
    std::set<std::pair<std::string, std::string>> targets;
    for (const auto& m : model_.modifiers) {
      const bool supp = m.kind == ModifierKind::suppressor;
      const std::string kind(to_string(m.kind));
      const std::string where = kind + " " + m.target.str();

      if (m.time_ms <= 0) {
        report(DiagCode::non_positive_time,
               kind + " on " + q(m.target.str()) + " has non-positive time " +
                   std::to_string(m.time_ms) + " ms",
               where, m.span);
      }

      std::optional<ResolvedLine> target = resolve(model_, m.target);
      if (!target) {
        report(DiagCode::dangling_reference,
               kind + " target " + q(m.target.str()) + " does not name a declared line", where,
               m.target.span);
      } else {
        const auto want = supp ? LineDirection::input : LineDirection::output;
        if (target->direction != want) {
          report(DiagCode::kind_target_mismatch,
                 kind + " must target an " + (supp ? "input" : "output") + " line, but " +
                     q(m.target.str()) + " is an " + (supp ? "output" : "input") + " line",
                 where, m.target.span);
          target.reset();
        } else if (!targets.insert({m.target.module, m.target.line}).second) {
          report(DiagCode::stacked_modifiers,
                 "line " + q(m.target.str()) + " already has a modifier; " + kind +
                     " controlled by " + q(m.controlled_by.str()) + " is stacked on it",
                 where, m.span);
        }
      }

      auto control = endpoint(m.controlled_by, LineDirection::output, kind + " control line", where);
      if (!target || !control) continue;

      if (control->module->layer < target->module->layer) {
        report(supp ? DiagCode::suppressor_layer : DiagCode::inhibitor_layer,
               kind + " on " + q(m.target.str()) + " is controlled by " +
                   q(m.controlled_by.str()) + " at layer " + std::to_string(control->module->layer) +
                   ", below the layer " + std::to_string(target->module->layer) + " of module " +
                   q(target->module->name),
               where, m.span);
      }
      if (supp && control->line->data_type != target->line->data_type) {
        report(DiagCode::type_mismatch,
               "suppressor control line " + q(m.controlled_by.str()) + " (" +
                   control->line->data_type + ") differs in type from suppressed input " +
                   q(m.target.str()) + " (" + target->line->data_type + ")",
               where, m.span);
      }
    }
  }

  const SystemModel& model_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::string code_name(DiagCode code) { return "V" + std::to_string(static_cast<int>(code)); }

std::string_view severity_name(Severity severity) {
  return severity == Severity::error ? "error" : "warning";
}

std::vector<Diagnostic> validate(const SystemModel& model) { return Checker(model).run(); }

std::string render(const Diagnostic& diag, std::string_view file) {
  std::string out(file);
  out += ':';
  out += diag.span ? std::to_string(diag.span->line) : "0";
  out += ':';
  out += diag.span ? std::to_string(diag.span->column) : "0";
  out += ": ";
  out += severity_name(diag.severity);
  out += '[' + code_name(diag.code) + "]: " + diag.message;
  return out;
}

}  // namespace subsum
