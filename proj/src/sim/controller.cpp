#include "subsum/sim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "subsum/dsl.hpp"

namespace subsum::sim {
namespace {

constexpr std::string_view kExampleSource = R"(system explorer "Two-layer controller: avoid obstacles, wander aimlessly." {
  type RangeMap "Robot-centered range readings with the heading they were taken at.";
  type Force "Repulsive force in the robot frame.";
  type Heading "Absolute heading in radians.";
  type Halt "Whether the way ahead is blocked.";
  type Drive "Request to drive forward.";

  module sonar layer 0 "Samples the range finders into a robot-centered map." {
    out map: RangeMap;
  }
  module collide layer 0 "Halts the robot when something is close ahead." {
    in map: RangeMap;
    out halt: Halt;
  }
  module feelforce layer 0 "Sums repulsive forces from every reading." {
    in map: RangeMap;
    out force: Force;
  }
  module runaway layer 0 "Heads away when the force grows too large." {
    in force: Force;
    out heading: Heading;
  }
  module turn layer 0 "Rotates toward the commanded heading." {
    in heading: Heading;
    out go: Drive;
  }
  module forward layer 0 "Drives ahead unless halted." {
    in halt: Halt;
    in go: Drive;
  }
  module wander layer 1 "Picks a random heading now and then." {
    out heading: Heading;
  }
  module avoid layer 1 "Bends the wander heading away from obstacles." {
    in wish: Heading;
    in force: Force;
    out heading: Heading;
  }

  wire sonar.map -> collide.map;
  wire sonar.map -> feelforce.map;
  wire feelforce.force -> runaway.force;
  wire runaway.heading -> turn.heading;
  wire collide.halt -> forward.halt;
  wire turn.go -> forward.go;
  wire wander.heading -> avoid.wish;
  wire feelforce.force -> avoid.force;

  suppress turn.heading by avoid.heading for 250 ms;
}
)";

/// Lazily seeded per-module generator.
class Rng {
 public:
  std::mt19937_64& get(const rt::StepContext& ctx) {
    if (!rng_) rng_.emplace(ctx.seed());
    return *rng_;
  }

 private:
  std::optional<std::mt19937_64> rng_;
};

class Sonar final : public rt::ModuleBehavior {
 public:
  Sonar(RobotPort& port, const ControllerParams& p, const SensorConfig& s)
      : port_(port), p_(p), s_(s) {}

  void step(rt::StepContext& ctx) override {
    auto& rng = rng_.get(ctx);
    RangeMap map;
    map.heading = port_.pose().theta;
    for (double a : s_.angles) map.readings.push_back({a, port_.range(a, s_.max_range, s_.noise_std, rng)});
    ctx.emit("map", map);
    ctx.request_wakeup(p_.sonar_period_ms);
  }

 private:
  RobotPort& port_;
  ControllerParams p_;
  SensorConfig s_;
  Rng rng_;
};

class Collide final : public rt::ModuleBehavior {
 public:
  explicit Collide(const ControllerParams& p) : p_(p) {}

  void step(rt::StepContext& ctx) override {
    if (!ctx.fresh("map")) return;
    auto map = ctx.read_as<RangeMap>("map");
    Halt h;
    for (const auto& r : map->readings) {
      if (std::abs(r.angle) <= p_.halt_sector && r.range < p_.d_halt) h.blocked = true;
    }
    ctx.emit("halt", h);
  }

 private:
  ControllerParams p_;
};

class FeelForce final : public rt::ModuleBehavior {
 public:
  FeelForce(const ControllerParams& p, const SensorConfig& s) : p_(p), s_(s) {}

  void step(rt::StepContext& ctx) override {
    if (!ctx.fresh("map")) return;
    ctx.emit("force", repulsive_force(*ctx.read_as<RangeMap>("map"), p_.r_min, s_.max_range));
  }

 private:
  ControllerParams p_;
  SensorConfig s_;
};

class Runaway final : public rt::ModuleBehavior {
 public:
  explicit Runaway(const ControllerParams& p) : p_(p) {}

  void step(rt::StepContext& ctx) override {
    if (!ctx.fresh("force")) return;
    auto f = *ctx.read_as<Force>("force");
    if (std::hypot(f.x, f.y) <= p_.f_thresh) return;
    ctx.emit("heading", Heading{wrap_angle(f.heading + std::atan2(f.y, f.x))});
  }

 private:
  ControllerParams p_;
};

class Turn final : public rt::ModuleBehavior {
 public:
  Turn(RobotPort& port, const ControllerParams& p) : port_(port), p_(p) {}

  void step(rt::StepContext& ctx) override {
    if (ctx.fresh("heading")) {
      target_ = ctx.read_as<Heading>("heading")->theta;
      go_sent_ = false;
    }
    if (!target_) return;
    const double err = wrap_angle(*target_ - port_.pose().theta);
    if (std::abs(err) < p_.aligned && !go_sent_) {
      ctx.emit("go", Drive{});
      go_sent_ = true;
    }
    if (std::abs(err) < 0.02) {
      port_.set_angular(0);
      return;
    }
    port_.set_angular(std::clamp(p_.k_omega * err, -p_.omega_max, p_.omega_max));
    ctx.request_wakeup(p_.turn_period_ms);
  }

 private:
  RobotPort& port_;
  ControllerParams p_;
  std::optional<double> target_;
  bool go_sent_ = false;
};

class Forward final : public rt::ModuleBehavior {
 public:
  Forward(RobotPort& port, const ControllerParams& p) : port_(port), p_(p) {}

  void step(rt::StepContext& ctx) override {
    if (ctx.fresh("halt")) blocked_ = ctx.read_as<Halt>("halt")->blocked;
    if (ctx.fresh("go")) {
      ctx.read("go");
      drive_until_ = ctx.now() + p_.drive_ms;
      ctx.request_wakeup(p_.drive_ms);
    }
    const bool driving = !blocked_ && ctx.now() < drive_until_;
    port_.set_linear(driving ? p_.v_cruise : 0.0);
  }

 private:
  RobotPort& port_;
  ControllerParams p_;
  bool blocked_ = false;
  std::int64_t drive_until_ = 0;
};

class Wander final : public rt::ModuleBehavior {
 public:
  explicit Wander(const ControllerParams& p) : p_(p) {}

  void step(rt::StepContext& ctx) override {
    std::uniform_real_distribution<double> dist(-kPi, kPi);
    ctx.emit("heading", Heading{dist(rng_.get(ctx))});
    ctx.request_wakeup(p_.wander_period_ms);
  }

 private:
  ControllerParams p_;
  Rng rng_;
};

class Avoid final : public rt::ModuleBehavior {
 public:
  explicit Avoid(const ControllerParams& p) : p_(p) {}

  void step(rt::StepContext& ctx) override {
    const bool fresh = ctx.fresh("wish") || ctx.fresh("force");
    auto wish = ctx.read_as<Heading>("wish");
    auto force = ctx.read_as<Force>("force");
    if (!fresh || !wish || !force) return;
    const double c = std::cos(force->heading);
    const double s = std::sin(force->heading);
    const double fx = c * force->x - s * force->y;
    const double fy = s * force->x + c * force->y;
    const double x = p_.w_g * std::cos(wish->theta) + p_.w_f * fx;
    const double y = p_.w_g * std::sin(wish->theta) + p_.w_f * fy;
    ctx.emit("heading", Heading{std::atan2(y, x)});
  }

 private:
  ControllerParams p_;
};

}  // namespace

SensorConfig SensorConfig::ring12() {
  SensorConfig s;
  s.angles.clear();
  for (int i = 0; i < 12; ++i) s.angles.push_back(wrap_angle(i * kPi / 6));
  return s;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2 * kPi);
  return a <= -kPi ? a + 2 * kPi : a;
}

Force repulsive_force(const RangeMap& map, double r_min, double max_range) {
  Force f;
  f.heading = map.heading;
  for (const auto& r : map.readings) {
    if (r.range >= max_range) continue;
    const double d = std::max(r.range, r_min);
    f.x -= std::cos(r.angle) / (d * d);
    f.y -= std::sin(r.angle) / (d * d);
  }
  return f;
}

SystemModel example_model() {
  auto parsed = dsl::parse(kExampleSource);
  return std::move(*parsed.model);
}

rt::BehaviorMap example_behaviors(const SystemModel& model, RobotPort& port,
                                  const ControllerParams& p, const SensorConfig& s) {
  rt::BehaviorMap all;
  all["sonar"] = std::make_unique<Sonar>(port, p, s);
  all["collide"] = std::make_unique<Collide>(p);
  all["feelforce"] = std::make_unique<FeelForce>(p, s);
  all["runaway"] = std::make_unique<Runaway>(p);
  all["turn"] = std::make_unique<Turn>(port, p);
  all["forward"] = std::make_unique<Forward>(port, p);
  all["wander"] = std::make_unique<Wander>(p);
  all["avoid"] = std::make_unique<Avoid>(p);
  rt::BehaviorMap out;
  for (const auto& m : model.modules) {
    auto it = all.find(m.name);
    if (it != all.end()) out.emplace(m.name, std::move(it->second));
  }
  return out;
}

}  // namespace subsum::sim
