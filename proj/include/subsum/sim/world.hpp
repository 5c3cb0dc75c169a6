#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace subsum::sim {

struct Pose {
  double x = 0;
  double y = 0;
  double theta = 0;  // radians, counter-clockwise from +x

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Axis-aligned; (x, y) is the lower-left corner.
struct Rect {
  double x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Circle {
  double x = 0, y = 0, r = 0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

using Obstacle = std::variant<Rect, Circle>;

/// Walled arena [0, width] x [0, height].
struct World {
  double width = 10;
  double height = 10;
  std::vector<Obstacle> obstacles;
  Pose start;
  double robot_radius = 0.2;
};

class WorldError : public std::runtime_error {
 public:
  enum class Kind { schema, geometry };

  WorldError(Kind kind, std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message),
        kind(kind),
        pointer(std::move(pointer)) {}

  Kind kind;
  std::string pointer;  // JSON pointer to the offending value
};

/// Parses and validates
/// `{"size":[w,h], "start":[x,y,theta], "robot_radius":r, "obstacles":[{"rect":[x,y,w,h]} | {"circle":[x,y,r]}]}`.
/// `robot_radius` and `obstacles` are optional.
World load_world(std::string_view json);

/// Throws WorldError(geometry) when the start pose overlaps a wall or obstacle.
void check_world(const World& world);

/// True when a disc of radius `r` at (x, y) touches a wall or obstacle.
bool collides(const World& world, double x, double y, double r);

/// Distance from `from` along world angle `from.theta + angle` to the nearest
/// wall or obstacle, clamped to `max_range`. With `noise_std > 0`, Gaussian
/// noise from `rng` is added and the result clamped to [0, max_range].
double raycast(const World& world, const Pose& from, double angle, double max_range,
               double noise_std = 0, std::mt19937_64* rng = nullptr);

}  // namespace subsum::sim
