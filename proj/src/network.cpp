#include "network.hpp"

#include <algorithm>
#include <cassert>

namespace subsum::rt::detail {

std::uint64_t mix_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Network::Network(const SystemModel& model, BehaviorMap behaviors, const RuntimeConfig& config)
    : model_(model) {
  if (auto diags = validate(model_); !diags.empty()) {
    std::string msg = "model '" + model_.name + "' is invalid: " + code_name(diags.front().code) +
                      " " + diags.front().message;
    throw InstantiateError(InstantiateError::Kind::invalid_model, msg, {}, std::move(diags));
  }
  if (config.tick_ms < 1) {
    throw InstantiateError(InstantiateError::Kind::invalid_config, "tick_ms must be at least 1");
  }

  std::vector<std::string> missing;
  for (const auto& m : model_.modules) {
    auto it = behaviors.find(m.name);
    if (it == behaviors.end() || !it->second) missing.push_back(m.name);
  }
  if (!missing.empty()) {
    std::string msg = "no behavior for module";
    for (const auto& n : missing) msg += " '" + n + "'";
    throw InstantiateError(InstantiateError::Kind::missing_behavior, msg, missing);
  }
  std::vector<std::string> extra;
  for (const auto& [name, b] : behaviors) {
    if (!find_module(model_, name)) extra.push_back(name);
  }
  if (!extra.empty()) {
    std::string msg = "behavior for unknown module";
    for (const auto& n : extra) msg += " '" + n + "'";
    throw InstantiateError(InstantiateError::Kind::extra_behavior, msg, extra);
  }

  const auto all_layers = layers(model_);
  if (config.enabled_layers) {
    for (auto l : *config.enabled_layers) {
      if (!all_layers.count(l)) {
        throw InstantiateError(InstantiateError::Kind::invalid_config,
                               "enabled layer " + std::to_string(l) + " does not exist in the model");
      }
    }
    for (auto l : all_layers) {
      if (!config.enabled_layers->count(l)) disabled_.insert(l);
    }
  }

  slots_.reserve(model_.modules.size());
  for (std::size_t i = 0; i < model_.modules.size(); ++i) {
    const auto& m = model_.modules[i];
    ModuleSlot slot;
    slot.index = i;
    slot.name = m.name;
    slot.layer = m.layer;
    slot.seed = mix_seed(config.seed, m.name);
    slot.behavior = std::move(behaviors.find(m.name)->second);
    slots_.push_back(std::move(slot));

    for (const auto& l : m.inputs) {
      input_ids_.emplace(m.name + "." + l.name, inputs_.size());
      inputs_.push_back(Buffer{i, m.name + "." + l.name, l.data_type, std::nullopt, false});
    }
    for (const auto& l : m.outputs) {
      output_ids_.emplace(m.name + "." + l.name, outputs_.size());
      Output o;
      o.module = i;
      o.qualified = m.name + "." + l.name;
      o.data_type = l.data_type;
      outputs_.push_back(std::move(o));
    }
  }
  order_.resize(slots_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return slots_[a].layer < slots_[b].layer; });

  for (const auto& w : model_.wires) {
    outputs_[output_ids_.at(w.source.str())].sinks.push_back(input_ids_.at(w.sink.str()));
  }
  suppressor_on_input_.assign(inputs_.size(), std::nullopt);
  for (std::size_t i = 0; i < model_.modifiers.size(); ++i) {
    const auto& mod = model_.modifiers[i];
    Window w;
    w.modifier = &model_.modifiers[i];
    if (mod.kind == ModifierKind::suppressor) {
      w.target = input_ids_.at(mod.target.str());
      suppressor_on_input_[w.target] = i;
    } else {
      w.target = output_ids_.at(mod.target.str());
      outputs_[w.target].inhibitor = i;
    }
    outputs_[output_ids_.at(mod.controlled_by.str())].controls.push_back(i);
    windows_.push_back(w);
  }
}

bool Network::layer_enabled(std::uint32_t layer) const {
  std::lock_guard lock(mu_);
  return !disabled_.count(layer);
}

std::vector<std::size_t> Network::set_layer_enabled(std::uint32_t layer, bool enabled,
                                                    std::int64_t now) {
  std::lock_guard lock(mu_);
  if (enabled) {
    disabled_.erase(layer);
  } else {
    disabled_.insert(layer);
  }
  record_locked(now, EventKind::layer_toggle, "layer " + std::to_string(layer),
                enabled ? "enabled" : "disabled");
  std::vector<std::size_t> ready;
  if (enabled) {
    for (const auto& b : inputs_) {
      if (b.fresh && slots_[b.module].layer == layer &&
          std::find(ready.begin(), ready.end(), b.module) == ready.end()) {
        ready.push_back(b.module);
      }
    }
  }
  return ready;
}

std::size_t Network::input_of(std::size_t module, std::string_view name) const {
  auto it = input_ids_.find(slots_[module].name + "." + std::string(name));
  if (it == input_ids_.end()) {
    throw RuntimeError(RuntimeError::Kind::undeclared_line,
                       "module '" + slots_[module].name + "' has no input '" + std::string(name) + "'",
                       slots_[module].name);
  }
  return it->second;
}

std::optional<StepContext::Reading> Network::read(std::size_t module, std::string_view input) {
  std::lock_guard lock(mu_);
  auto& b = inputs_[input_of(module, input)];
  if (!b.latest) return std::nullopt;
  StepContext::Reading r{b.latest->payload, b.fresh};
  b.fresh = false;
  return r;
}

bool Network::fresh(std::size_t module, std::string_view input) const {
  std::lock_guard lock(mu_);
  return inputs_[input_of(module, input)].fresh;
}

std::vector<std::size_t> Network::emit(std::size_t module, std::string_view output,
                                       Payload payload, std::int64_t now) {
  std::lock_guard lock(mu_);
  auto oit = output_ids_.find(slots_[module].name + "." + std::string(output));
  if (oit == output_ids_.end()) {
    throw RuntimeError(RuntimeError::Kind::undeclared_line,
                       "module '" + slots_[module].name + "' has no output '" +
                           std::string(output) + "'",
                       slots_[module].name);
  }
  auto& out = outputs_[oit->second];
  record_locked(now, EventKind::emit, out.qualified, out.data_type);

  // 1. inhibited outputs transmit nothing, control role included.
  if (out.inhibitor && open(windows_[*out.inhibitor], now)) {
    record_locked(now, EventKind::inhibited_drop, out.qualified,
                  "inhibited until " + std::to_string(*windows_[*out.inhibitor].until));
    return {};
  }

  Message msg{out.data_type, std::move(payload), LineRef{slots_[module].name, std::string(output), {}},
              now};
  for (const auto& p : out.probes) p->push_back(msg);

  // 2. control role: open or extend windows.
  for (auto mi : out.controls) {
    auto& w = windows_[mi];
    const auto until = now + w.modifier->time_ms;
    w.until = w.until ? std::max(*w.until, until) : until;
    record_locked(now, EventKind::window_open,
                  std::string(to_string(w.modifier->kind)) + " " + w.modifier->target.str(),
                  "by " + out.qualified + " until " + std::to_string(*w.until));
  }

  std::vector<std::size_t> written;
  auto write = [&](std::size_t input_id) {
    auto& b = inputs_[input_id];
    assert(b.data_type == msg.data_type);
    b.latest = msg;
    b.fresh = true;
    if (std::find(written.begin(), written.end(), b.module) == written.end()) {
      written.push_back(b.module);
    }
  };

  // 3. ordinary fan-out, minus suppressed sinks.
  for (auto sink : out.sinks) {
    const auto& supp = suppressor_on_input_[sink];
    if (supp && open(windows_[*supp], now)) {
      record_locked(now, EventKind::suppressed_drop, inputs_[sink].qualified,
                    "from " + out.qualified + "; suppressed until " +
                        std::to_string(*windows_[*supp].until));
      continue;
    }
    write(sink);
    record_locked(now, EventKind::deliver, inputs_[sink].qualified, "from " + out.qualified);
  }

  // 4. suppressors replace the target stream with control data.
  for (auto mi : out.controls) {
    const auto& w = windows_[mi];
    if (w.modifier->kind != ModifierKind::suppressor) continue;
    write(w.target);
    record_locked(now, EventKind::suppressor_inject, inputs_[w.target].qualified,
                  "from " + out.qualified);
  }
  return written;
}

std::size_t Network::inject(std::string_view input, std::string_view data_type, Payload payload,
                            std::int64_t now) {
  std::lock_guard lock(mu_);
  auto it = input_ids_.find(input);
  if (it == input_ids_.end()) {
    throw RuntimeError(RuntimeError::Kind::unknown_line,
                       "no input line '" + std::string(input) + "'", std::string(input));
  }
  auto& b = inputs_[it->second];
  if (b.data_type != data_type) {
    throw RuntimeError(RuntimeError::Kind::type_mismatch,
                       "input '" + b.qualified + "' carries " + b.data_type + ", not " +
                           std::string(data_type),
                       b.qualified);
  }
  auto ref = parse_qualified(input);
  b.latest = Message{b.data_type, std::move(payload), ref.value_or(LineRef{}), now};
  b.fresh = true;
  record_locked(now, EventKind::deliver, b.qualified, "injected");
  return b.module;
}

Probe Network::probe(std::string_view output) {
  std::lock_guard lock(mu_);
  auto it = output_ids_.find(output);
  if (it == output_ids_.end()) {
    throw RuntimeError(RuntimeError::Kind::unknown_line,
                       "no output line '" + std::string(output) + "'", std::string(output));
  }
  auto sink = std::make_shared<std::vector<Message>>();
  outputs_[it->second].probes.push_back(sink);
  return Probe(sink);
}

void Network::record(std::int64_t t, EventKind kind, std::string subject, std::string detail) {
  std::lock_guard lock(mu_);
  record_locked(t, kind, std::move(subject), std::move(detail));
}

void Network::record_locked(std::int64_t t, EventKind kind, std::string subject,
                            std::string detail) {
  trace_.push_back(Event{t, kind, std::move(subject), std::move(detail)});
}

Trace Network::trace() const {
  std::lock_guard lock(mu_);
  return trace_;
}

Trace Network::trace_since(std::size_t begin) const {
  std::lock_guard lock(mu_);
  return Trace(trace_.begin() + static_cast<std::ptrdiff_t>(std::min(begin, trace_.size())),
               trace_.end());
}

std::size_t Network::trace_size() const {
  std::lock_guard lock(mu_);
  return trace_.size();
}

std::optional<std::int64_t> Network::window_until(std::size_t modifier) const {
  std::lock_guard lock(mu_);
  return windows_.at(modifier).until;
}

std::optional<Message> Network::buffer(std::string_view input) const {
  std::lock_guard lock(mu_);
  auto it = input_ids_.find(input);
  if (it == input_ids_.end()) {
    throw RuntimeError(RuntimeError::Kind::unknown_line,
                       "no input line '" + std::string(input) + "'", std::string(input));
  }
  return inputs_[it->second].latest;
}

}  // namespace subsum::rt::detail
