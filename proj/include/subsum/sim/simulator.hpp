#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/runtime.hpp"
#include "subsum/sim/controller.hpp"
#include "subsum/sim/world.hpp"

namespace subsum::sim {

struct SimConfig {
  rt::RuntimeConfig runtime;  // tick_ms, seed, enabled layers
  std::int64_t ticks = 10'000;
  std::int64_t dt_ms = 50;    // physics step
  double cell = 0.25;         // coverage grid pitch
  ControllerParams params;
  SensorConfig sensors;
};

/// Unicycle kinematics host for the controller's motor and sensor modules.
class SimRobot final : public RobotPort {
 public:
  SimRobot(const World& world, const ControllerParams& params);

  Pose pose() const override { return pose_; }
  double range(double angle, double max_range, double noise_std, std::mt19937_64& rng) override;
  void set_linear(double v) override;
  void set_angular(double omega) override;
  double linear() const { return v_; }
  double angular() const { return omega_; }

  /// Integrates one step; a move that would collide leaves the position
  /// unchanged and returns false.
  bool advance(double dt_s);

 private:
  const World& world_;
  ControllerParams params_;
  Pose pose_;
  double v_ = 0;
  double omega_ = 0;
};

/// Overrides controller and sensor settings from a JSON object whose keys are
/// ControllerParams field names, plus `"sensors": "three" | "ring12"`,
/// `"max_range"` and `"noise_std"`. Unknown keys and ill-typed or
/// non-positive periods throw WorldError(schema).
void apply_params(std::string_view json, SimConfig& config);

struct PathPoint {
  std::int64_t t_ms = 0;
  double x = 0;
  double y = 0;

  friend bool operator==(const PathPoint&, const PathPoint&) = default;
};

struct SimResult {
  std::vector<PathPoint> path;  // every dt_ms, starting at 0
  std::size_t coverage_cells = 0;
  std::size_t collisions = 0;
  rt::Trace trace;
};

/// Runs the example controller (or `model`, a subset of it) in `world`.
SimResult run_sim(const World& world, const SimConfig& config);
SimResult run_sim(const World& world, const SimConfig& config, const SystemModel& model);

/// Distinct `cell`-sized grid squares containing a path point.
std::size_t coverage(const std::vector<PathPoint>& path, double cell);

/// `t_ms,x,y` rows.
std::string path_csv(const std::vector<PathPoint>& path);

struct SvgPath {
  const std::vector<PathPoint>* path;
  std::string color;
  std::string label;
};

/// Arena, obstacles, and one polyline per path.
std::string render_svg(const World& world, const std::vector<SvgPath>& paths);

}  // namespace subsum::sim
