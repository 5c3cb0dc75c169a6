#pragma once

#include <any>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "subsum/runtime.hpp"

namespace subsum::testing {

/// Emits fixed payloads at fixed instants, waking itself up for each.
class ScriptBehavior final : public rt::ModuleBehavior {
 public:
  struct Emission {
    std::string output;
    rt::Payload payload;
  };

  void at(std::int64_t t, std::string output, rt::Payload payload) {
    script_[t].push_back({std::move(output), std::move(payload)});
  }

  void step(rt::StepContext& ctx) override {
    if (!armed_) {
      armed_ = true;
      for (const auto& [t, _] : script_) {
        if (t > ctx.now()) ctx.request_wakeup(t - ctx.now());
      }
    }
    auto it = script_.find(ctx.now());
    if (it == script_.end() || done_.count(ctx.now())) return;
    done_.insert(ctx.now());
    for (const auto& e : it->second) ctx.emit(e.output, e.payload);
  }

 private:
  std::map<std::int64_t, std::vector<Emission>> script_;
  std::set<std::int64_t> done_;
  bool armed_ = false;
};

/// Counts dispatches and keeps the last value seen on each input it reads.
class Recorder final : public rt::ModuleBehavior {
 public:
  explicit Recorder(std::vector<std::string> inputs = {}) : inputs_(std::move(inputs)) {}

  void step(rt::StepContext& ctx) override {
    ++*dispatches;
    for (const auto& in : inputs_) {
      if (auto r = ctx.read(in); r && r->fresh) seen->push_back(r->payload);
    }
  }

  std::shared_ptr<int> dispatches = std::make_shared<int>(0);
  std::shared_ptr<std::vector<rt::Payload>> seen = std::make_shared<std::vector<rt::Payload>>();

 private:
  std::vector<std::string> inputs_;
};

}  // namespace subsum::testing
