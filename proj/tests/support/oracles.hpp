#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subsum/metamodel.hpp"

namespace subsum::testing {

/// (code number, location) pairs a correct validator must report.
using Verdicts = std::multiset<std::pair<int, std::string>>;

/// Rule-by-rule evaluation over every element, written without the
/// validator's helpers: each lookup is a linear scan of the model.
inline Verdicts brute_force_verdicts(const SystemModel& m) {
  Verdicts v;

  struct Hit {
    bool found = false;
    bool input = false;
    std::uint32_t layer = 0;
    std::string type;
  };
  // The first module with the name owns the reference; inputs shadow outputs.
  auto lookup = [&](const LineRef& r) {
    Hit h;
    for (const auto& mod : m.modules) {
      if (mod.name != r.module) continue;
      for (const auto& l : mod.inputs) {
        if (l.name == r.line) return Hit{true, true, mod.layer, l.data_type};
      }
      for (const auto& l : mod.outputs) {
        if (l.name == r.line) return Hit{true, false, mod.layer, l.data_type};
      }
      return h;
    }
    return h;
  };

  for (std::size_t i = 0; i < m.data_types.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (m.data_types[j].name == m.data_types[i].name) {
        v.insert({2, "type " + m.data_types[i].name});
        break;
      }
    }
  }
  for (std::size_t i = 0; i < m.modules.size(); ++i) {
    const auto& mod = m.modules[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (m.modules[j].name == mod.name) {
        v.insert({2, "module " + mod.name});
        break;
      }
    }
    std::vector<std::pair<std::string, const LineDecl*>> lines;
    for (const auto& l : mod.inputs) lines.push_back({"input", &l});
    for (const auto& l : mod.outputs) lines.push_back({"output", &l});
    for (std::size_t a = 0; a < lines.size(); ++a) {
      const std::string where = "module " + mod.name + " / " + lines[a].first + " " + lines[a].second->name;
      for (std::size_t b = 0; b < a; ++b) {
        if (lines[b].second->name == lines[a].second->name) {
          v.insert({2, where});
          break;
        }
      }
      bool declared = false;
      for (const auto& t : m.data_types) declared = declared || t.name == lines[a].second->data_type;
      if (!declared) v.insert({1, where});
    }
  }

  for (std::size_t i = 0; i < m.wires.size(); ++i) {
    const auto& w = m.wires[i];
    const std::string where = "wire " + w.source.str() + " -> " + w.sink.str();
    const Hit s = lookup(w.source);
    const Hit d = lookup(w.sink);
    const bool s_ok = s.found && !s.input;
    const bool d_ok = d.found && d.input;
    if (!s_ok) v.insert({1, where});
    if (!d_ok) v.insert({1, where});
    if (d_ok) {
      for (std::size_t j = 0; j < i; ++j) {
        const Hit dj = lookup(m.wires[j].sink);
        if (dj.found && dj.input && m.wires[j].sink == w.sink) {
          v.insert({3, where});
          break;
        }
      }
    }
    if (s_ok && d_ok && s.type != d.type) v.insert({6, where});
  }

  for (std::size_t i = 0; i < m.modifiers.size(); ++i) {
    const auto& mod = m.modifiers[i];
    const bool supp = mod.kind == ModifierKind::suppressor;
    const std::string where = std::string(supp ? "suppressor " : "inhibitor ") + mod.target.str();
    if (mod.time_ms <= 0) v.insert({7, where});
    const Hit t = lookup(mod.target);
    const bool t_right_kind = t.found && t.input == supp;
    if (!t.found) v.insert({1, where});
    if (t.found && !t_right_kind) v.insert({9, where});
    if (t_right_kind) {
      for (std::size_t j = 0; j < i; ++j) {
        const auto& other = m.modifiers[j];
        const Hit tj = lookup(other.target);
        if (tj.found && tj.input == (other.kind == ModifierKind::suppressor) && other.target == mod.target) {
          v.insert({8, where});
          break;
        }
      }
    }
    const Hit c = lookup(mod.controlled_by);
    const bool c_ok = c.found && !c.input;
    if (!c_ok) v.insert({1, where});
    if (t_right_kind && c_ok) {
      if (!(c.layer >= t.layer)) v.insert({supp ? 4 : 5, where});
      if (supp && c.type != t.type) v.insert({6, where});
    }
  }
  return v;
}

/// Window algebra oracle: a data message routed at `t` is intercepted iff
/// some control arrival c opened a window covering t: c + time > t, with
/// c < t, or c == t when control is routed before data at equal instants.
inline bool intercepted(const std::vector<std::int64_t>& controls, std::int64_t time, std::int64_t t,
                        bool control_first) {
  return std::any_of(controls.begin(), controls.end(), [&](std::int64_t c) {
    return (c < t || (control_first && c == t)) && t < c + time;
  });
}

}  // namespace subsum::testing
