#include "subsum/runtime.hpp"

#include <algorithm>
#include <sstream>

#include "network.hpp"

namespace subsum::rt {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::emit: return "emit";
    case EventKind::deliver: return "deliver";
    case EventKind::suppressed_drop: return "suppressed_drop";
    case EventKind::suppressor_inject: return "suppressor_inject";
    case EventKind::inhibited_drop: return "inhibited_drop";
    case EventKind::window_open: return "window_open";
    case EventKind::dispatch: return "dispatch";
    case EventKind::wakeup: return "wakeup";
    case EventKind::layer_toggle: return "layer_toggle";
  }
  return "?";
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class FunctionBehavior final : public ModuleBehavior {
 public:
  explicit FunctionBehavior(std::function<void(StepContext&)> fn) : fn_(std::move(fn)) {}
  void step(StepContext& ctx) override { fn_(ctx); }

 private:
  std::function<void(StepContext&)> fn_;
};

}  // namespace

std::string to_csv(std::span<const Event> events) {
  std::ostringstream os;
  os << "t_ms,kind,subject,detail\n";
  for (const auto& e : events) {
    os << e.t_ms << ',' << to_string(e.kind) << ',' << csv_field(e.subject) << ','
       << csv_field(e.detail) << '\n';
  }
  return os.str();
}

std::unique_ptr<ModuleBehavior> make_behavior(std::function<void(StepContext&)> fn) {
  return std::make_unique<FunctionBehavior>(std::move(fn));
}

// StepContext

std::optional<StepContext::Reading> StepContext::read(std::string_view input) {
  return net_.read(slot_.index, input);
}

bool StepContext::fresh(std::string_view input) const { return net_.fresh(slot_.index, input); }

void StepContext::emit(std::string_view output, Payload payload) {
  auto written = net_.emit(slot_.index, output, std::move(payload), now_);
  if (!written.empty()) host_.on_delivered(written, now_);
}

void StepContext::request_wakeup(std::int64_t delay_ms) {
  host_.request_wakeup(slot_.index, now_ + std::max(delay_ms, host_.tick_ms()));
}

bool StepContext::has_var(std::string_view name) const { return slot_.vars.count(name) > 0; }

Payload& StepContext::var(std::string_view name) {
  auto it = slot_.vars.find(name);
  if (it == slot_.vars.end()) it = slot_.vars.emplace(std::string(name), Payload{}).first;
  return it->second;
}

std::uint64_t StepContext::seed() const { return slot_.seed; }
std::string_view StepContext::module_name() const { return slot_.name; }
std::uint32_t StepContext::layer() const { return slot_.layer; }

// Runtime

struct Runtime::Impl final : detail::StepHost {
  Impl(const SystemModel& model, BehaviorMap behaviors, RuntimeConfig cfg)
      : net(model, std::move(behaviors), cfg), config(std::move(cfg)) {}

  void on_delivered(const std::vector<std::size_t>& modules, std::int64_t at) override {
    // Emissions during instant `at` become dispatchable one tick later.
    schedule(modules, at + config.tick_ms);
  }

  void schedule(const std::vector<std::size_t>& modules, std::int64_t due) {
    for (auto m : modules) {
      auto& slot = net.slots()[m];
      if (!net.layer_enabled(slot.layer)) continue;
      slot.input_due = slot.input_due ? std::min(*slot.input_due, due) : due;
    }
  }

  void request_wakeup(std::size_t module, std::int64_t at) override {
    net.slots()[module].wakeups.insert(at);
  }

  std::int64_t tick_ms() const override { return config.tick_ms; }

  void process(std::int64_t t) {
    for (auto idx : net.dispatch_order()) {
      auto& slot = net.slots()[idx];
      if (!net.layer_enabled(slot.layer)) continue;
      const bool start = slot.start_pending;
      const bool input = slot.input_due && *slot.input_due <= t;
      const bool wake = !slot.wakeups.empty() && *slot.wakeups.begin() <= t;
      if (!start && !input && !wake) continue;

      std::string reasons;
      auto add = [&](std::string_view r) {
        if (!reasons.empty()) reasons += '+';
        reasons += r;
      };
      if (start) add("start");
      if (input) add("input");
      if (wake) {
        add("wakeup");
        net.record(t, EventKind::wakeup, slot.name, "due " + std::to_string(*slot.wakeups.begin()));
        slot.wakeups.erase(slot.wakeups.begin(), slot.wakeups.upper_bound(t));
      }
      slot.start_pending = false;
      if (input) slot.input_due.reset();
      net.record(t, EventKind::dispatch, slot.name, reasons);

      StepContext ctx(net, slot, *this, t);
      try {
        slot.behavior->step(ctx);
      } catch (const RuntimeError&) {
        throw;
      } catch (const std::exception& e) {
        throw RuntimeError(RuntimeError::Kind::behavior_failure,
                           "module '" + slot.name + "' failed at t=" + std::to_string(t) + ": " +
                               e.what(),
                           slot.name);
      } catch (...) {
        throw RuntimeError(RuntimeError::Kind::behavior_failure,
                           "module '" + slot.name + "' failed at t=" + std::to_string(t),
                           slot.name);
      }
    }
  }

  detail::Network net;
  RuntimeConfig config;
  std::int64_t now = 0;  // next instant to process
};

Runtime::Runtime(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Runtime::Runtime(Runtime&&) noexcept = default;
Runtime& Runtime::operator=(Runtime&&) noexcept = default;
Runtime::~Runtime() = default;

Runtime Runtime::instantiate(const SystemModel& model, BehaviorMap behaviors, RuntimeConfig config) {
  return Runtime(std::make_unique<Impl>(model, std::move(behaviors), std::move(config)));
}

Trace Runtime::run_until(std::int64_t t_ms) {
  auto& im = *impl_;
  if (t_ms < im.now) {
    throw RuntimeError(RuntimeError::Kind::invalid_argument,
                       "cannot run backwards from t=" + std::to_string(im.now) + " to t=" +
                           std::to_string(t_ms));
  }
  if (im.config.max_ticks) t_ms = std::min(t_ms, *im.config.max_ticks * im.config.tick_ms);
  const auto begin = im.net.trace_size();
  while (im.now < t_ms) {
    im.process(im.now);
    im.now += im.config.tick_ms;
  }
  return im.net.trace_since(begin);
}

Trace Runtime::run() {
  if (!impl_->config.max_ticks) {
    throw RuntimeError(RuntimeError::Kind::invalid_argument, "run() needs config.max_ticks");
  }
  return run_until(*impl_->config.max_ticks * impl_->config.tick_ms);
}

void Runtime::set_layer_enabled(std::uint32_t layer, bool enabled) {
  auto& im = *impl_;
  if (!layers(im.net.model()).count(layer)) {
    throw RuntimeError(RuntimeError::Kind::unknown_layer,
                       "layer " + std::to_string(layer) + " does not exist in the model");
  }
  auto ready = im.net.set_layer_enabled(layer, enabled, im.now);
  im.schedule(ready, im.now);
}

bool Runtime::layer_enabled(std::uint32_t layer) const { return impl_->net.layer_enabled(layer); }

void Runtime::inject(std::string_view input, std::string_view data_type, Payload payload) {
  auto& im = *impl_;
  auto module = im.net.inject(input, data_type, std::move(payload), im.now);
  im.schedule({module}, im.now);
}

Probe Runtime::probe(std::string_view output) { return impl_->net.probe(output); }

std::int64_t Runtime::now() const { return impl_->now; }
const Trace& Runtime::trace() const { return impl_->net.trace_unlocked(); }
const SystemModel& Runtime::model() const { return impl_->net.model(); }
std::size_t Runtime::behavior_count() const { return impl_->net.slots().size(); }
std::size_t Runtime::modifier_count() const { return impl_->net.model().modifiers.size(); }
std::size_t Runtime::input_buffer_count() const { return impl_->net.input_count(); }

std::optional<std::int64_t> Runtime::window_until(std::size_t index) const {
  return impl_->net.window_until(index);
}

std::optional<Message> Runtime::buffer(std::string_view input) const {
  return impl_->net.buffer(input);
}

}  // namespace subsum::rt
