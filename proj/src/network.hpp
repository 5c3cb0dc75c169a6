#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/runtime.hpp"

namespace subsum::rt::detail {

/// Per-module execution state. Scheduling fields belong to whichever host
/// drives the network.
struct ModuleSlot {
  std::size_t index = 0;
  std::string name;
  std::uint32_t layer = 0;
  std::uint64_t seed = 0;
  std::unique_ptr<ModuleBehavior> behavior;
  std::map<std::string, Payload, std::less<>> vars;

  bool start_pending = true;
  std::optional<std::int64_t> input_due;
  std::set<std::int64_t> wakeups;
};

/// Callbacks from a running step into the executor that owns it.
class StepHost {
 public:
  virtual ~StepHost() = default;
  virtual void on_delivered(const std::vector<std::size_t>& modules, std::int64_t now) = 0;
  virtual void request_wakeup(std::size_t module, std::int64_t at) = 0;
  virtual std::int64_t tick_ms() const = 0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view name);

/// Buffers, modifier windows, routing and the trace. Every public member
/// takes the internal lock, so the network can be shared between threads.
class Network {
 public:
  Network(const SystemModel& model, BehaviorMap behaviors, const RuntimeConfig& config);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const SystemModel& model() const { return model_; }
  std::vector<ModuleSlot>& slots() { return slots_; }
  const std::vector<std::size_t>& dispatch_order() const { return order_; }
  std::size_t input_count() const { return inputs_.size(); }

  bool layer_enabled(std::uint32_t layer) const;
  /// Returns the modules of `layer` that hold fresh input.
  std::vector<std::size_t> set_layer_enabled(std::uint32_t layer, bool enabled, std::int64_t now);

  std::optional<StepContext::Reading> read(std::size_t module, std::string_view input);
  bool fresh(std::size_t module, std::string_view input) const;

  /// Routes a message emitted by `module` and returns the modules whose
  /// buffers were written (dispatch candidates).
  std::vector<std::size_t> emit(std::size_t module, std::string_view output, Payload payload,
                                std::int64_t now);
  std::size_t inject(std::string_view input, std::string_view data_type, Payload payload,
                     std::int64_t now);
  Probe probe(std::string_view output);

  void record(std::int64_t t, EventKind kind, std::string subject, std::string detail = {});
  const Trace& trace_unlocked() const { return trace_; }
  Trace trace() const;
  Trace trace_since(std::size_t begin) const;
  std::size_t trace_size() const;

  std::optional<std::int64_t> window_until(std::size_t modifier) const;
  std::optional<Message> buffer(std::string_view input) const;

 private:
  struct Buffer {
    std::size_t module = 0;
    std::string qualified;
    std::string data_type;
    std::optional<Message> latest;
    bool fresh = false;
  };
  struct Output {
    std::size_t module = 0;
    std::string qualified;
    std::string data_type;
    std::vector<std::size_t> sinks;           // input ids
    std::optional<std::size_t> inhibitor;     // modifier index
    std::vector<std::size_t> controls;        // modifier indices
    std::vector<std::shared_ptr<std::vector<Message>>> probes;
  };
  struct Window {
    const Modifier* modifier = nullptr;
    std::size_t target = 0;  // input id (suppressor) or output id (inhibitor)
    std::optional<std::int64_t> until;
  };

  bool open(const Window& w, std::int64_t now) const { return w.until && now < *w.until; }
  std::size_t input_of(std::size_t module, std::string_view name) const;
  void record_locked(std::int64_t t, EventKind kind, std::string subject, std::string detail);

  SystemModel model_;
  std::vector<ModuleSlot> slots_;
  std::vector<std::size_t> order_;
  std::vector<Buffer> inputs_;
  std::vector<Output> outputs_;
  std::vector<Window> windows_;
  std::vector<std::optional<std::size_t>> suppressor_on_input_;
  std::map<std::string, std::size_t, std::less<>> input_ids_;
  std::map<std::string, std::size_t, std::less<>> output_ids_;
  std::set<std::uint32_t> disabled_;

  mutable std::mutex mu_;
  Trace trace_;
};

}  // namespace subsum::rt::detail
