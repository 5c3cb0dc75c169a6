#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/metamodel.hpp"
#include "subsum/validate.hpp"

namespace subsum::rt {

/// Opaque message content; its concrete type is agreed between the behaviors
/// on either end of a wire.
using Payload = std::any;

struct Message {
  std::string data_type;
  Payload payload;
  LineRef origin;
  std::int64_t timestamp_ms = 0;
};

enum class EventKind {
  emit,
  deliver,
  suppressed_drop,
  suppressor_inject,
  inhibited_drop,
  window_open,
  dispatch,
  wakeup,
  layer_toggle,
};

std::string_view to_string(EventKind kind);

struct Event {
  std::int64_t t_ms = 0;
  EventKind kind = EventKind::emit;
  std::string subject;
  std::string detail;

  friend bool operator==(const Event&, const Event&) = default;
};

using Trace = std::vector<Event>;

/// `t_ms,kind,subject,detail` with RFC 4180 quoting where needed.
std::string to_csv(std::span<const Event> events);

struct RuntimeConfig {
  std::optional<std::set<std::uint32_t>> enabled_layers;  // nullopt: all layers
  std::int64_t tick_ms = 1;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> max_ticks;
};

class InstantiateError : public std::runtime_error {
 public:
  enum class Kind { missing_behavior, extra_behavior, invalid_model, invalid_config };

  InstantiateError(Kind kind, std::string message, std::vector<std::string> names = {},
                   std::vector<Diagnostic> diagnostics = {})
      : std::runtime_error(std::move(message)),
        kind(kind),
        names(std::move(names)),
        diagnostics(std::move(diagnostics)) {}

  Kind kind;
  std::vector<std::string> names;
  std::vector<Diagnostic> diagnostics;
};

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind {
    unknown_layer,
    unknown_line,
    type_mismatch,
    undeclared_line,
    behavior_failure,
    invalid_argument,
  };

  RuntimeError(Kind kind, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), kind(kind), subject(std::move(subject)) {}

  Kind kind;
  std::string subject;
};

namespace detail {
class Network;
class StepHost;
struct ModuleSlot;
}  // namespace detail

/// What a behavior sees during one dispatch.
class StepContext {
 public:
  struct Reading {
    Payload payload;
    bool fresh = false;
  };

  /// Latest value on an input (nullopt before the first write). Reading
  /// acknowledges the value, clearing its freshness.
  std::optional<Reading> read(std::string_view input);

  template <typename T>
  std::optional<T> read_as(std::string_view input) {
    auto r = read(input);
    if (!r || !r->payload.has_value()) return std::nullopt;
    return std::any_cast<T>(r->payload);
  }

  /// Peek at freshness without acknowledging.
  bool fresh(std::string_view input) const;

  void emit(std::string_view output, Payload payload);

  std::int64_t now() const { return now_; }

  /// Dispatch this module again `delay_ms` from now (at least one tick).
  void request_wakeup(std::int64_t delay_ms);

  bool has_var(std::string_view name) const;
  Payload& var(std::string_view name);

  template <typename T>
  T& var_as(std::string_view name, T initial = T{}) {
    Payload& v = var(name);
    if (!v.has_value()) v = std::move(initial);
    return std::any_cast<T&>(v);
  }

  /// Per-module seed derived from the runtime seed and the module name.
  std::uint64_t seed() const;
  std::string_view module_name() const;
  std::uint32_t layer() const;

  StepContext(detail::Network& net, detail::ModuleSlot& slot, detail::StepHost& host,
              std::int64_t now)
      : net_(net), slot_(slot), host_(host), now_(now) {}

 private:
  detail::Network& net_;
  detail::ModuleSlot& slot_;
  detail::StepHost& host_;
  std::int64_t now_;
};

/// A module's program: called once per dispatch.
class ModuleBehavior {
 public:
  virtual ~ModuleBehavior() = default;
  virtual void step(StepContext& ctx) = 0;
};

using BehaviorMap = std::map<std::string, std::unique_ptr<ModuleBehavior>, std::less<>>;

/// Wraps a callable as a behavior.
std::unique_ptr<ModuleBehavior> make_behavior(std::function<void(StepContext&)> fn);

/// Recording sink attached to an output line. With ConcurrentRuntime, read
/// it only after stop().
class Probe {
 public:
  const std::vector<Message>& messages() const { return *messages_; }
  std::size_t size() const { return messages_->size(); }

 private:
  friend class detail::Network;
  explicit Probe(std::shared_ptr<std::vector<Message>> m) : messages_(std::move(m)) {}
  std::shared_ptr<std::vector<Message>> messages_;
};

/// Deterministic single-threaded virtual-clock executor.
class Runtime {
 public:
  /// Throws InstantiateError when the model fails validation or `behaviors`
  /// does not cover the module names exactly.
  static Runtime instantiate(const SystemModel& model, BehaviorMap behaviors,
                             RuntimeConfig config = {});

  Runtime(Runtime&&) noexcept;
  Runtime& operator=(Runtime&&) noexcept;
  ~Runtime();

  /// Processes every instant in [now, t_ms) and returns the events recorded.
  Trace run_until(std::int64_t t_ms);

  /// Runs to `max_ticks * tick_ms`; throws when no limit is configured.
  Trace run();

  void set_layer_enabled(std::uint32_t layer, bool enabled);
  bool layer_enabled(std::uint32_t layer) const;

  /// Writes an input buffer as if wired; the module is dispatched at the next
  /// processed instant.
  void inject(std::string_view input, std::string_view data_type, Payload payload);
  Probe probe(std::string_view output);

  std::int64_t now() const;
  const Trace& trace() const;
  const SystemModel& model() const;
  std::size_t behavior_count() const;
  std::size_t modifier_count() const;
  std::size_t input_buffer_count() const;

  /// Window end of modifier `index` (model order); closed when <= now.
  std::optional<std::int64_t> window_until(std::size_t index) const;
  /// Current buffer content for an input line.
  std::optional<Message> buffer(std::string_view input) const;

 private:
  struct Impl;
  explicit Runtime(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Same routing semantics, one thread per module, virtual time mapped onto
/// the wall clock (`tick_ms` of virtual time per real millisecond).
/// Guarantees per-buffer and window-check atomicity, not global ordering.
class ConcurrentRuntime {
 public:
  ConcurrentRuntime(const SystemModel& model, BehaviorMap behaviors, RuntimeConfig config = {});
  ~ConcurrentRuntime();

  ConcurrentRuntime(const ConcurrentRuntime&) = delete;
  ConcurrentRuntime& operator=(const ConcurrentRuntime&) = delete;

  void start();
  void stop();

  void set_layer_enabled(std::uint32_t layer, bool enabled);
  void inject(std::string_view input, std::string_view data_type, Payload payload);
  Probe probe(std::string_view output);

  std::int64_t now() const;
  Trace trace() const;
  std::optional<Message> buffer(std::string_view input) const;
  /// First behavior failure, if any thread stopped on one.
  std::optional<std::string> failure() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace subsum::rt
