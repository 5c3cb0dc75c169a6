#include "subsum/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <variant>

#include <json.hpp>

namespace subsum::sim {

void apply_params(std::string_view text, SimConfig& config) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw WorldError(WorldError::Kind::schema, "/", e.what());
  }
  if (!doc.is_object()) throw WorldError(WorldError::Kind::schema, "/", "expected an object");

  auto& p = config.params;
  const std::map<std::string, std::variant<double*, std::int64_t*>> fields = {
      {"sonar_period_ms", &p.sonar_period_ms}, {"d_halt", &p.d_halt},
      {"halt_sector", &p.halt_sector},         {"r_min", &p.r_min},
      {"f_thresh", &p.f_thresh},               {"w_g", &p.w_g},
      {"w_f", &p.w_f},                         {"wander_period_ms", &p.wander_period_ms},
      {"k_omega", &p.k_omega},                 {"omega_max", &p.omega_max},
      {"aligned", &p.aligned},                 {"turn_period_ms", &p.turn_period_ms},
      {"v_cruise", &p.v_cruise},               {"v_max", &p.v_max},
      {"drive_ms", &p.drive_ms},               {"max_range", &config.sensors.max_range},
      {"noise_std", &config.sensors.noise_std},
  };
  for (const auto& [key, value] : doc.items()) {
    const std::string pointer = "/" + key;
    if (key == "sensors") {
      if (value == "three") {
        config.sensors.angles = SensorConfig{}.angles;
      } else if (value == "ring12") {
        config.sensors.angles = SensorConfig::ring12().angles;
      } else {
        throw WorldError(WorldError::Kind::schema, pointer, "expected \"three\" or \"ring12\"");
      }
      continue;
    }
    auto f = fields.find(key);
    if (f == fields.end()) throw WorldError(WorldError::Kind::schema, pointer, "unknown parameter");
    if (auto* d = std::get_if<double*>(&f->second)) {
      if (!value.is_number() || !std::isfinite(value.get<double>()) || value.get<double>() < 0) {
        throw WorldError(WorldError::Kind::schema, pointer, "expected a non-negative number");
      }
      **d = value.get<double>();
    } else {
      if (!value.is_number_integer() || value.get<std::int64_t>() <= 0) {
        throw WorldError(WorldError::Kind::schema, pointer, "expected a positive integer");
      }
      *std::get<std::int64_t*>(f->second) = value.get<std::int64_t>();
    }
  }
}

SimRobot::SimRobot(const World& world, const ControllerParams& params)
    : world_(world), params_(params), pose_(world.start) {}

double SimRobot::range(double angle, double max_range, double noise_std, std::mt19937_64& rng) {
  return raycast(world_, pose_, angle, max_range, noise_std, &rng);
}

void SimRobot::set_linear(double v) { v_ = std::clamp(v, -params_.v_max, params_.v_max); }

void SimRobot::set_angular(double omega) {
  omega_ = std::clamp(omega, -params_.omega_max, params_.omega_max);
}

bool SimRobot::advance(double dt_s) {
  const double x = pose_.x + v_ * std::cos(pose_.theta) * dt_s;
  const double y = pose_.y + v_ * std::sin(pose_.theta) * dt_s;
  pose_.theta = wrap_angle(pose_.theta + omega_ * dt_s);
  if (v_ != 0 && collides(world_, x, y, world_.robot_radius)) return false;
  pose_.x = x;
  pose_.y = y;
  return true;
}

SimResult run_sim(const World& world, const SimConfig& config) {
  return run_sim(world, config, example_model());
}

SimResult run_sim(const World& world, const SimConfig& config, const SystemModel& model) {
  check_world(world);
  if (config.dt_ms <= 0) throw std::invalid_argument("dt_ms must be positive");
  if (config.ticks < 0) throw std::invalid_argument("ticks must not be negative");
  if (config.cell <= 0) throw std::invalid_argument("cell must be positive");

  SimRobot robot(world, config.params);
  auto runtime = rt::Runtime::instantiate(
      model, example_behaviors(model, robot, config.params, config.sensors), config.runtime);

  SimResult result;
  const std::int64_t end = config.ticks * config.runtime.tick_ms;
  result.path.push_back({0, world.start.x, world.start.y});
  for (std::int64_t t = 0; t < end;) {
    const std::int64_t next = std::min(t + config.dt_ms, end);
    runtime.run_until(next);
    if (!robot.advance(static_cast<double>(next - t) / 1000.0)) ++result.collisions;
    t = next;
    if (t % config.dt_ms == 0) result.path.push_back({t, robot.pose().x, robot.pose().y});
  }
  result.coverage_cells = coverage(result.path, config.cell);
  result.trace = runtime.trace();
  return result;
}

std::size_t coverage(const std::vector<PathPoint>& path, double cell) {
  std::set<std::pair<long long, long long>> cells;
  for (const auto& p : path) {
    cells.emplace(static_cast<long long>(std::floor(p.x / cell)),
                  static_cast<long long>(std::floor(p.y / cell)));
  }
  return cells.size();
}

std::string path_csv(const std::vector<PathPoint>& path) {
  std::string out = "t_ms,x,y\n";
  char buf[96];
  for (const auto& p : path) {
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f\n", static_cast<long long>(p.t_ms), p.x, p.y);
    out += buf;
  }
  return out;
}

std::string render_svg(const World& world, const std::vector<SvgPath>& paths) {
  constexpr double kScale = 60;  // px per meter
  const double w = world.width * kScale;
  const double h = world.height * kScale;
  auto px = [&](double x) { return x * kScale; };
  auto py = [&](double y) { return h - y * kScale; };
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                w, h, w, h);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "  <rect x=\"0\" y=\"0\" width=\"%.2f\" height=\"%.2f\" fill=\"white\" "
                "stroke=\"black\" stroke-width=\"2\"/>\n",
                w, h);
  out += buf;
  for (const auto& o : world.obstacles) {
    if (auto r = std::get_if<Rect>(&o)) {
      std::snprintf(buf, sizeof buf,
                    "  <rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#888\"/>\n",
                    px(r->x), py(r->y + r->h), px(r->w), px(r->h));
    } else {
      const auto& c = std::get<Circle>(o);
      std::snprintf(buf, sizeof buf, "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"#888\"/>\n",
                    px(c.x), py(c.y), px(c.r));
    }
    out += buf;
  }
  double legend_y = 18;
  for (const auto& p : paths) {
    out += "  <polyline fill=\"none\" stroke=\"" + p.color + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < p.path->size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px((*p.path)[i].x), py((*p.path)[i].y));
      out += buf;
    }
    out += "\"/>\n";
    if (!p.label.empty()) {
      std::snprintf(buf, sizeof buf, "  <text x=\"8\" y=\"%.0f\" font-size=\"14\" fill=\"", legend_y);
      out += buf;
      out += p.color + "\">" + p.label + "</text>\n";
      legend_y += 18;
    }
  }
  std::snprintf(buf, sizeof buf, "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" stroke=\"red\"/>\n",
                px(world.start.x), py(world.start.y), px(world.robot_radius));
  out += buf;
  out += "</svg>\n";
  return out;
}

}  // namespace subsum::sim
