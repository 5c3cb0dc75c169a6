#include <atomic>
#include <chrono>
#include <condition_variable>
#include <thread>

#include "network.hpp"
#include "subsum/runtime.hpp"

namespace subsum::rt {

namespace {

using Clock = std::chrono::steady_clock;

struct Worker {
  std::mutex mu;
  std::condition_variable cv;
  bool signaled = false;
  std::set<std::int64_t> wakeups;
  std::thread thread;
};

}  // namespace

struct ConcurrentRuntime::Impl final : detail::StepHost {
  Impl(const SystemModel& model, BehaviorMap behaviors, RuntimeConfig cfg)
      : net(model, std::move(behaviors), cfg), config(std::move(cfg)) {
    for (std::size_t i = 0; i < net.slots().size(); ++i) workers.push_back(std::make_unique<Worker>());
  }

  std::int64_t now() const {
    if (!running.load()) return stopped_at.load();
    auto real = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return real.count() * config.tick_ms;
  }

  Clock::time_point deadline(std::int64_t virtual_ms) const {
    return started + std::chrono::milliseconds(virtual_ms / config.tick_ms);
  }

  void on_delivered(const std::vector<std::size_t>& modules, std::int64_t) override {
    for (auto m : modules) {
      auto& w = *workers[m];
      {
        std::lock_guard lock(w.mu);
        w.signaled = true;
      }
      w.cv.notify_one();
    }
  }

  void request_wakeup(std::size_t module, std::int64_t at) override {
    auto& w = *workers[module];
    std::lock_guard lock(w.mu);
    w.wakeups.insert(at);
  }

  std::int64_t tick_ms() const override { return config.tick_ms; }

  void notify_all() {
    for (auto& w : workers) {
      { std::lock_guard lock(w->mu); }
      w->cv.notify_all();
    }
  }

  void loop(std::size_t index) {
    auto& slot = net.slots()[index];
    auto& w = *workers[index];
    bool start = true;
    while (true) {
      std::unique_lock lock(w.mu);
      auto ready = [&] {
        if (stopping.load()) return true;
        if (!net.layer_enabled(slot.layer)) return false;
        return start || w.signaled || (!w.wakeups.empty() && *w.wakeups.begin() <= now());
      };
      while (!ready()) {
        if (!w.wakeups.empty() && net.layer_enabled(slot.layer)) {
          w.cv.wait_until(lock, deadline(*w.wakeups.begin()));
        } else {
          w.cv.wait(lock);
        }
      }
      if (stopping.load()) return;

      const auto t = now();
      std::string reasons = start ? "start" : "";
      auto add = [&](std::string_view r) {
        if (!reasons.empty()) reasons += '+';
        reasons += r;
      };
      if (w.signaled) add("input");
      if (!w.wakeups.empty() && *w.wakeups.begin() <= t) {
        add("wakeup");
        w.wakeups.erase(w.wakeups.begin(), w.wakeups.upper_bound(t));
      }
      start = false;
      w.signaled = false;
      lock.unlock();

      net.record(t, EventKind::dispatch, slot.name, reasons);
      StepContext ctx(net, slot, *this, t);
      try {
        slot.behavior->step(ctx);
      } catch (const std::exception& e) {
        std::lock_guard fl(failure_mu);
        if (!failure) failure = "module '" + slot.name + "' failed: " + e.what();
        return;
      }
    }
  }

  detail::Network net;
  RuntimeConfig config;
  std::vector<std::unique_ptr<Worker>> workers;
  Clock::time_point started;
  std::atomic<bool> running{false};
  std::atomic<bool> stopping{false};
  std::atomic<std::int64_t> stopped_at{0};
  mutable std::mutex failure_mu;
  std::optional<std::string> failure;
};

ConcurrentRuntime::ConcurrentRuntime(const SystemModel& model, BehaviorMap behaviors,
                                     RuntimeConfig config)
    : impl_(std::make_unique<Impl>(model, std::move(behaviors), std::move(config))) {}

ConcurrentRuntime::~ConcurrentRuntime() { stop(); }

void ConcurrentRuntime::start() {
  auto& im = *impl_;
  if (im.running.load()) return;
  im.stopping = false;
  im.started = Clock::now();
  im.running = true;
  for (std::size_t i = 0; i < im.workers.size(); ++i) {
    im.workers[i]->thread = std::thread([&im, i] { im.loop(i); });
  }
}

void ConcurrentRuntime::stop() {
  auto& im = *impl_;
  if (!im.running.load()) return;
  im.stopped_at = im.now();
  im.stopping = true;
  im.notify_all();
  for (auto& w : im.workers) {
    if (w->thread.joinable()) w->thread.join();
  }
  im.running = false;
}

void ConcurrentRuntime::set_layer_enabled(std::uint32_t layer, bool enabled) {
  auto& im = *impl_;
  if (!layers(im.net.model()).count(layer)) {
    throw RuntimeError(RuntimeError::Kind::unknown_layer,
                       "layer " + std::to_string(layer) + " does not exist in the model");
  }
  auto ready = im.net.set_layer_enabled(layer, enabled, im.now());
  im.on_delivered(ready, im.now());
  im.notify_all();
}

void ConcurrentRuntime::inject(std::string_view input, std::string_view data_type, Payload payload) {
  auto& im = *impl_;
  auto module = im.net.inject(input, data_type, std::move(payload), im.now());
  im.on_delivered({module}, im.now());
}

Probe ConcurrentRuntime::probe(std::string_view output) { return impl_->net.probe(output); }
std::int64_t ConcurrentRuntime::now() const { return impl_->now(); }
Trace ConcurrentRuntime::trace() const { return impl_->net.trace(); }

std::optional<Message> ConcurrentRuntime::buffer(std::string_view input) const {
  return impl_->net.buffer(input);
}

std::optional<std::string> ConcurrentRuntime::failure() const {
  std::lock_guard lock(impl_->failure_mu);
  return impl_->failure;
}

}  // namespace subsum::rt
