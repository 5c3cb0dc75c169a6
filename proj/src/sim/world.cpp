#include "subsum/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

namespace subsum::sim {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message) {
  throw WorldError(WorldError::Kind::schema, pointer.empty() ? "/" : pointer, message);
}

std::vector<double> numbers(const json& doc, const std::string& key, const std::string& pointer,
                            std::size_t count) {
  auto it = doc.find(key);
  if (it == doc.end()) schema_error(pointer + "/" + key, "missing '" + key + "'");
  const std::string here = pointer + "/" + key;
  if (!it->is_array() || it->size() != count) {
    schema_error(here, "expected an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& v = (*it)[i];
    if (!v.is_number()) schema_error(here + "/" + std::to_string(i), "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(here + "/" + std::to_string(i), "expected a finite number");
    out.push_back(d);
  }
  return out;
}

double rect_distance(const Rect& r, double x, double y) {
  const double dx = std::max({r.x - x, 0.0, x - (r.x + r.w)});
  const double dy = std::max({r.y - y, 0.0, y - (r.y + r.h)});
  return std::hypot(dx, dy);
}

/// Ray parameter of the first hit with an axis-aligned box, if any.
std::optional<double> hit_rect(const Rect& r, double ox, double oy, double dx, double dy) {
  double t0 = 0;
  double t1 = INFINITY;
  const double lo[2] = {r.x, r.y};
  const double hi[2] = {r.x + r.w, r.y + r.h};
  const double o[2] = {ox, oy};
  const double d[2] = {dx, dy};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return std::nullopt;
      continue;
    }
    double a = (lo[k] - o[k]) / d[k];
    double b = (hi[k] - o[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

std::optional<double> hit_circle(const Circle& c, double ox, double oy, double dx, double dy) {
  const double fx = ox - c.x;
  const double fy = oy - c.y;
  const double b = fx * dx + fy * dy;
  const double cc = fx * fx + fy * fy - c.r * c.r;
  if (cc <= 0) return 0.0;  // inside
  const double disc = b * b - cc;
  if (disc < 0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0) return std::nullopt;
  return t;
}

}  // namespace

World load_world(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("", "expected an object");

  World w;
  auto size = numbers(doc, "size", "", 2);
  if (size[0] <= 0) schema_error("/size/0", "width must be positive");
  if (size[1] <= 0) schema_error("/size/1", "height must be positive");
  w.width = size[0];
  w.height = size[1];
  auto start = numbers(doc, "start", "", 3);
  w.start = Pose{start[0], start[1], start[2]};

  if (doc.contains("robot_radius")) {
    const auto& r = doc["robot_radius"];
    if (!r.is_number() || r.get<double>() <= 0) schema_error("/robot_radius", "expected a positive number");
    w.robot_radius = r.get<double>();
  }

  if (doc.contains("obstacles")) {
    const auto& obs = doc["obstacles"];
    if (!obs.is_array()) schema_error("/obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string here = "/obstacles/" + std::to_string(i);
      const auto& o = obs[i];
      if (!o.is_object() || o.size() != 1) schema_error(here, "expected {\"rect\": [...]} or {\"circle\": [...]}");
      if (o.contains("rect")) {
        auto v = numbers(o, "rect", here, 4);
        if (v[2] <= 0 || v[3] <= 0) schema_error(here + "/rect", "width and height must be positive");
        w.obstacles.emplace_back(Rect{v[0], v[1], v[2], v[3]});
      } else if (o.contains("circle")) {
        auto v = numbers(o, "circle", here, 3);
        if (v[2] <= 0) schema_error(here + "/circle/2", "radius must be positive");
        w.obstacles.emplace_back(Circle{v[0], v[1], v[2]});
      } else {
        schema_error(here, "unknown obstacle kind '" + o.begin().key() + "'");
      }
    }
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "size" && key != "start" && key != "robot_radius" && key != "obstacles") {
      schema_error("/" + key, "unknown key");
    }
  }
  check_world(w);
  return w;
}

void check_world(const World& world) {
  if (collides(world, world.start.x, world.start.y, world.robot_radius)) {
    throw WorldError(WorldError::Kind::geometry, "/start",
                     "robot start overlaps a wall or obstacle");
  }
}

bool collides(const World& world, double x, double y, double r) {
  if (x - r < 0 || y - r < 0 || x + r > world.width || y + r > world.height) return true;
  for (const auto& o : world.obstacles) {
    if (auto rect = std::get_if<Rect>(&o)) {
      if (rect_distance(*rect, x, y) < r) return true;
    } else {
      const auto& c = std::get<Circle>(o);
      if (std::hypot(x - c.x, y - c.y) < c.r + r) return true;
    }
  }
  return false;
}

double raycast(const World& world, const Pose& from, double angle, double max_range,
               double noise_std, std::mt19937_64* rng) {
  const double a = from.theta + angle;
  const double dx = std::cos(a);
  const double dy = std::sin(a);
  double best = max_range;

  // Walls, seen from inside the arena.
  if (dx > 0) best = std::min(best, (world.width - from.x) / dx);
  if (dx < 0) best = std::min(best, -from.x / dx);
  if (dy > 0) best = std::min(best, (world.height - from.y) / dy);
  if (dy < 0) best = std::min(best, -from.y / dy);

  for (const auto& o : world.obstacles) {
    std::optional<double> t;
    if (auto rect = std::get_if<Rect>(&o)) {
      t = hit_rect(*rect, from.x, from.y, dx, dy);
    } else {
      t = hit_circle(std::get<Circle>(o), from.x, from.y, dx, dy);
    }
    if (t) best = std::min(best, *t);
  }
  best = std::max(best, 0.0);

  if (noise_std > 0 && rng) {
    std::normal_distribution<double> noise(0.0, noise_std);
    best = std::clamp(best + noise(*rng), 0.0, max_range);
  }
  return best;
}

}  // namespace subsum::sim
