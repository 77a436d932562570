/*
 * Copyright 2026 The Minicar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "minicar/world/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "minicar/core/error.h"
#include "minicar/core/rng.h"

namespace minicar {

namespace {

std::vector<double> NumberArray(const Json& v, std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n) {
    throw ParseError(where + ": expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(where + ": expected numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw ParseError(where + ": non-finite value");
    out.push_back(d);
  }
  return out;
}

std::string Indexed(const char* what, std::size_t i) {
  return std::string(what) + "[" + std::to_string(i) + "]";
}

}  // namespace

std::array<Vec2, 4> Obstacle::Corners() const {
  const double hx = 0.5 * extents.x;
  const double hy = 0.5 * extents.y;
  return {center + Rotate({hx, hy}, yaw), center + Rotate({-hx, hy}, yaw),
          center + Rotate({-hx, -hy}, yaw), center + Rotate({hx, -hy}, yaw)};
}

Scene LoadScene(const Json& doc) {
  if (!doc.is_object()) throw ParseError("scene: expected a JSON object");
  Scene scene;
  if (!doc.contains("name") || !doc["name"].is_string()) {
    throw ParseError("name: expected a string");
  }
  scene.name = doc["name"].get<std::string>();
  if (!doc.contains("bounds")) throw ParseError("bounds: missing");
  const auto b = NumberArray(doc["bounds"], 4, "bounds");
  scene.bounds = {b[0], b[1], b[2], b[3]};

  if (doc.contains("walls")) {
    if (!doc["walls"].is_array()) throw ParseError("walls: expected an array");
    for (std::size_t i = 0; i < doc["walls"].size(); ++i) {
      const auto w = NumberArray(doc["walls"][i], 4, Indexed("walls", i));
      scene.walls.push_back({{w[0], w[1]}, {w[2], w[3]}});
    }
  }
  if (doc.contains("obstacles")) {
    if (!doc["obstacles"].is_array()) throw ParseError("obstacles: expected an array");
    for (std::size_t i = 0; i < doc["obstacles"].size(); ++i) {
      const Json& o = doc["obstacles"][i];
      const std::string where = Indexed("obstacles", i);
      if (!o.is_object()) throw ParseError(where + ": expected an object");
      if (!o.contains("center")) throw ParseError(where + ".center: missing");
      if (!o.contains("extents")) throw ParseError(where + ".extents: missing");
      const auto c = NumberArray(o["center"], 2, where + ".center");
      const auto e = NumberArray(o["extents"], 2, where + ".extents");
      Obstacle obs;
      obs.center = {c[0], c[1]};
      obs.extents = {e[0], e[1]};
      if (o.contains("yaw")) {
        if (!o["yaw"].is_number()) throw ParseError(where + ".yaw: expected a number");
        obs.yaw = o["yaw"].get<double>();
      }
      if (o.contains("unmapped")) {
        if (!o["unmapped"].is_boolean()) throw ParseError(where + ".unmapped: expected a bool");
        obs.unmapped = o["unmapped"].get<bool>();
      }
      scene.obstacles.push_back(obs);
    }
  }
  if (doc.contains("centerline")) {
    if (!doc["centerline"].is_array()) throw ParseError("centerline: expected an array");
    for (std::size_t i = 0; i < doc["centerline"].size(); ++i) {
      const auto p = NumberArray(doc["centerline"][i], 2, Indexed("centerline", i));
      scene.centerline.push_back({p[0], p[1]});
    }
  }
  if (doc.contains("spawn")) {
    const auto s = NumberArray(doc["spawn"], 3, "spawn");
    scene.spawn = {s[0], s[1], s[2]};
  } else {
    scene.spawn = {0.5 * (scene.bounds.min_x + scene.bounds.max_x),
                   0.5 * (scene.bounds.min_y + scene.bounds.max_y), 0.0};
  }
  ValidateScene(scene);
  return scene;
}

Scene LoadSceneFile(const std::filesystem::path& path) {
  try {
    return LoadScene(ReadJsonFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Json SceneToJson(const Scene& scene) {
  Json walls = Json::array();
  for (const Segment& w : scene.walls) walls.push_back({w.a.x, w.a.y, w.b.x, w.b.y});
  Json obstacles = Json::array();
  for (const Obstacle& o : scene.obstacles) {
    Json j = {{"center", {o.center.x, o.center.y}},
              {"extents", {o.extents.x, o.extents.y}},
              {"yaw", o.yaw}};
    if (o.unmapped) j["unmapped"] = true;
    obstacles.push_back(j);
  }
  Json doc = {{"name", scene.name},
              {"bounds",
               {scene.bounds.min_x, scene.bounds.min_y, scene.bounds.max_x, scene.bounds.max_y}},
              {"walls", walls},
              {"obstacles", obstacles},
              {"spawn", {scene.spawn.x, scene.spawn.y, scene.spawn.yaw}}};
  if (!scene.centerline.empty()) {
    Json line = Json::array();
    for (const Vec2& p : scene.centerline) line.push_back({p.x, p.y});
    doc["centerline"] = line;
  }
  return doc;
}

void ValidateScene(const Scene& scene) {
  const Bounds& b = scene.bounds;
  if (!(b.max_x > b.min_x && b.max_y > b.min_y)) {
    throw ValidationError("bounds: max must exceed min on both axes");
  }
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    const Segment& w = scene.walls[i];
    if (!b.Contains(w.a) || !b.Contains(w.b)) {
      throw ValidationError(Indexed("walls", i) + ": outside scene bounds");
    }
  }
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    const Obstacle& o = scene.obstacles[i];
    if (!(o.extents.x > 0.0 && o.extents.y > 0.0)) {
      throw ValidationError(Indexed("obstacles", i) + ".extents: must be positive");
    }
    for (const Vec2& c : o.Corners()) {
      if (!b.Contains(c)) throw ValidationError(Indexed("obstacles", i) + ": outside scene bounds");
    }
  }
  if (!b.Contains(scene.spawn.position())) throw ValidationError("spawn: outside scene bounds");
}

std::vector<Segment> SceneSegments(const Scene& scene, bool include_unmapped) {
  std::vector<Segment> out(scene.walls.begin(), scene.walls.end());
  for (const Obstacle& o : scene.obstacles) {
    if (o.unmapped && !include_unmapped) continue;
    const auto c = o.Corners();
    for (int k = 0; k < 4; ++k) out.push_back({c[k], c[(k + 1) % 4]});
  }
  return out;
}

Scene StaticMapScene(const Scene& scene) {
  Scene out = scene;
  std::erase_if(out.obstacles, [](const Obstacle& o) { return o.unmapped; });
  return out;
}

Scene PerturbScene(const Scene& scene, const PerturbationSigmas& sigmas, std::uint64_t seed,
                   std::vector<std::string>* warnings) {
  if (sigmas.xy == 0.0 && sigmas.theta == 0.0) return scene;
  RngStream rng = RngStream::ForChannel(seed, "scene_perturbation");
  const Bounds& b = scene.bounds;
  auto clamp_point = [&](Vec2 p, bool& clamped) {
    const Vec2 q{std::clamp(p.x, b.min_x, b.max_x), std::clamp(p.y, b.min_y, b.max_y)};
    if (q.x != p.x || q.y != p.y) clamped = true;
    return q;
  };

  Scene out = scene;
  for (std::size_t i = 0; i < out.walls.size(); ++i) {
    Segment& w = out.walls[i];
    const Vec2 shift{rng.Normal(0.0, sigmas.xy), rng.Normal(0.0, sigmas.xy)};
    const double turn = rng.Normal(0.0, sigmas.theta);
    const Vec2 mid = 0.5 * (w.a + w.b);
    const Vec2 new_mid = mid + shift;
    bool clamped = false;
    w = {clamp_point(new_mid + Rotate(w.a - mid, turn), clamped),
         clamp_point(new_mid + Rotate(w.b - mid, turn), clamped)};
    if (clamped && warnings != nullptr) {
      warnings->push_back(Indexed("walls", i) + ": perturbed outside bounds, clamped");
    }
  }
  for (std::size_t i = 0; i < out.obstacles.size(); ++i) {
    Obstacle& o = out.obstacles[i];
    o.center = o.center + Vec2{rng.Normal(0.0, sigmas.xy), rng.Normal(0.0, sigmas.xy)};
    o.yaw += rng.Normal(0.0, sigmas.theta);
    // Smallest translation that brings every corner back inside.
    double lo_x = -std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = hi_x;
    for (const Vec2& c : o.Corners()) {
      lo_x = std::max(lo_x, b.min_x - c.x);
      hi_x = std::min(hi_x, b.max_x - c.x);
      lo_y = std::max(lo_y, b.min_y - c.y);
      hi_y = std::min(hi_y, b.max_y - c.y);
    }
    const Vec2 push{std::clamp(0.0, lo_x, std::max(lo_x, hi_x)),
                    std::clamp(0.0, lo_y, std::max(lo_y, hi_y))};
    if (push.x != 0.0 || push.y != 0.0) {
      o.center = o.center + push;
      if (warnings != nullptr) {
        warnings->push_back(Indexed("obstacles", i) + ": perturbed outside bounds, clamped");
      }
    }
  }
  ValidateScene(out);
  return out;
}

Scene SpawnUnmappedObstacle(const Scene& scene, const Pose2& pose, Vec2 extents) {
  Scene out = scene;
  Obstacle o;
  o.center = pose.position();
  o.extents = extents;
  o.yaw = pose.yaw;
  o.unmapped = true;
  out.obstacles.push_back(o);
  ValidateScene(out);
  return out;
}

Scene RemoveObstacle(const Scene& scene, std::size_t index) {
  if (index >= scene.obstacles.size()) throw std::out_of_range("obstacle index out of range");
  Scene out = scene;
  out.obstacles.erase(out.obstacles.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

double CenterlineLength(const Scene& scene) {
  const auto& c = scene.centerline;
  if (c.size() < 2) throw std::invalid_argument("scene has no centerline");
  double len = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) len += Norm(c[(i + 1) % c.size()] - c[i]);
  return len;
}

double CenterlineProgress(const Scene& scene, Vec2 p) {
  const auto& c = scene.centerline;
  if (c.size() < 2) throw std::invalid_argument("scene has no centerline");
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 a = c[i];
    const Vec2 e = c[(i + 1) % c.size()] - a;
    const double len2 = Dot(e, e);
    const double t = len2 > 0.0 ? std::clamp(Dot(p - a, e) / len2, 0.0, 1.0) : 0.0;
    const double d = Norm(a + t * e - p);
    if (d < best) {
      best = d;
      best_s = s + t * std::sqrt(len2);
    }
    s += std::sqrt(len2);
  }
  return best_s >= s ? best_s - s : best_s;
}

}  // namespace minicar
