#pragma once

#include <cstdint>
#include <vector>

#include "subsum/metamodel.hpp"
#include "subsum/runtime.hpp"
#include "subsum/sim/world.hpp"

namespace subsum::sim {

inline constexpr double kPi = 3.14159265358979323846;

struct SensorConfig {
  std::vector<double> angles = {-kPi / 4, 0.0, kPi / 4};  // offsets from the heading
  double max_range = 3.0;
  double noise_std = 0.01;

  /// Twelve finders evenly spaced around the body.
  static SensorConfig ring12();
};

/// Tunables of the example controller. Distances in meters, angles in
/// radians, times in milliseconds.
struct ControllerParams {
  std::int64_t sonar_period_ms = 100;
  double d_halt = 0.45;         // collide: halt when something is this close ahead
  double halt_sector = 0.8;     // collide: readings within this angle of ahead count
  double r_min = 0.1;           // feelforce: readings closer than this weigh as r_min
  double f_thresh = 4.0;        // runaway: minimum force magnitude
  double w_g = 1.0;             // avoid: weight of the wander heading
  double w_f = 0.6;             // avoid: weight of the force
  std::int64_t wander_period_ms = 2500;
  double k_omega = 2.5;         // turn: proportional gain
  double omega_max = 1.5;       // rad/s
  double aligned = 1.0;         // turn: heading error small enough to drive
  std::int64_t turn_period_ms = 50;
  double v_cruise = 0.4;        // m/s
  double v_max = 1.0;
  std::int64_t drive_ms = 600;  // forward: how long one go request drives
};

/// Payloads travelling on the example controller's wires.
struct Reading {
  double angle = 0;  // offset from the heading
  double range = 0;
};
struct RangeMap {
  std::vector<Reading> readings;
  double heading = 0;  // robot heading when sampled
};
struct Force {
  double x = 0;  // robot frame: +x ahead
  double y = 0;
  double heading = 0;  // robot heading of the underlying readings
};
struct Heading {
  double theta = 0;  // absolute
};
struct Halt {
  bool blocked = false;
};
struct Drive {};

/// The robot as the motor and sensor modules see it.
class RobotPort {
 public:
  virtual ~RobotPort() = default;
  virtual Pose pose() const = 0;
  virtual double range(double angle, double max_range, double noise_std, std::mt19937_64& rng) = 0;
  virtual void set_linear(double v) = 0;
  virtual void set_angular(double omega) = 0;
};

/// The eight-module two-layer model.
SystemModel example_model();

/// Behaviors for example_model() driving `port`; only behaviors for modules
/// present in `model` are returned, so reduced models can be instantiated.
rt::BehaviorMap example_behaviors(const SystemModel& model, RobotPort& port,
                                  const ControllerParams& params = {},
                                  const SensorConfig& sensors = {});

/// Sum of -unit(r_i) / max(r_i, r_min)^2 over readings below `max_range`,
/// in the robot frame.
Force repulsive_force(const RangeMap& map, double r_min, double max_range);

/// Angle wrapped into (-pi, pi].
double wrap_angle(double a);

}  // namespace subsum::sim
