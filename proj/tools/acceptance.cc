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


// Headless acceptance run. One line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minicar/autonomy/localization.h"
#include "minicar/autonomy/occupancy_grid.h"
#include "minicar/autonomy/planner.h"
#include "minicar/core/rng.h"
#include "minicar/dynamics/friction_curve.h"
#include "minicar/dynamics/vehicle_model.h"
#include "minicar/imitation/behavior_cloning.h"
#include "minicar/imitation/mlp.h"
#include "minicar/sensors/sensors.h"
#include "minicar/sim/bc_run.h"
#include "minicar/sim/park.h"
#include "minicar/sim/simulation.h"

namespace fs = std::filesystem;
using namespace minicar;

namespace {

constexpr double kDt = 0.002;

struct Verdict {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [X]");
  }
};

std::string Fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string Fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

fs::path DataDir() {
  if (const char* env = std::getenv("MINICAR_DATA")) return env;
  return MINICAR_DATA_DIR;
}

Scene SquareRoom() {
  Scene s;
  s.name = "square";
  s.bounds = {0.0, 0.0, 2.0, 2.0};
  s.walls = {{{0, 0}, {2, 0}}, {{2, 0}, {2, 2}}, {{2, 2}, {0, 2}}, {{0, 2}, {0, 0}}};
  return s;
}

VehicleState Drive(VehicleState s, const VehicleConfig& cfg, DriveCommand cmd, double seconds) {
  const int n = static_cast<int>(std::lround(seconds / kDt));
  for (int i = 0; i < n; ++i) s = Step(s, cfg, cmd, kDt);
  return s;
}

Verdict Actuators() {
  Verdict v;
  const VehicleConfig cfg = VehicleConfig::Default();
  const VehicleState s = Drive(SettledState(cfg), cfg, {1.0, 0.0}, 8.0);
  v.Require(s.v_x >= 0.247 && s.v_x <= 0.273, Fmt("top speed %.4f m/s in [0.247, 0.273]", s.v_x));

  // Full-lock slew through the complete model, timed to within half a degree.
  VehicleState t = SettledState(cfg);
  double time = 0.0;
  double peak = 0.0;
  while (t.steer_angle < cfg.geometry.max_steer - 0.5 * kPi / 180.0 && time < 5.0) {
    t = Step(t, cfg, {0.0, 1.0}, kDt);
    time += kDt;
  }
  const double expected = (kPi / 6.0) / 0.42;
  v.Require(std::abs(time - expected) <= 0.1 * expected,
            Fmt("0->30 deg slew %.3f s (target %.3f s +-10%%)", time, expected));

  RngStream rng(3);
  for (int i = 0; i < 20000; ++i) {
    t = Step(t, cfg, {rng.Uniform(-1, 1), rng.Uniform(-1.5, 1.5)}, kDt);
    peak = std::max(peak, std::abs(t.steer_angle));
  }
  v.Require(peak <= kPi / 6.0, Fmt("peak |steer| %.6f rad <= %.6f", peak, kPi / 6.0));
  return v;
}

Verdict Ackermann() {
  Verdict v;
  const double delta = kPi / 6.0;
  const AckermannAngles a = ComputeAckermannAngles({0.2, 0.15, kPi / 6.0}, delta);
  const double t = std::tan(delta);
  const double left = std::atan(0.2 * t / (0.2 + 0.5 * 0.15 * t));
  const double right = std::atan(0.2 * t / (0.2 - 0.5 * 0.15 * t));
  v.Require(std::abs(a.left - left) <= 1e-6 && std::abs(a.right - right) <= 1e-6,
            Fmt("delta_l %.6f delta_r %.6f", a.left, a.right) +
                Fmt(" vs formula %.6f %.6f within 1e-6", left, right));
  // Four-digit reference values; the second is quoted 1.6e-4 below the formula.
  v.Require(std::abs(a.left - 0.4431) < 2e-4 && std::abs(a.right - 0.6349) < 2e-4,
            Fmt("quoted 0.4431/0.6349 off by %.1e/%.1e (< 2e-4)", std::abs(a.left - 0.4431),
                std::abs(a.right - 0.6349)));
  bool anti = true;
  RngStream rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.Uniform(-delta, delta);
    const AckermannAngles p = ComputeAckermannAngles({0.2, 0.15, delta}, d);
    const AckermannAngles m = ComputeAckermannAngles({0.2, 0.15, delta}, -d);
    anti &= m.left == -p.right && m.right == -p.left;
  }
  v.Require(anti, "antisymmetry exact over 1000 draws");
  return v;
}

Verdict TireSpline() {
  Verdict v;
  double worst = 0.0;
  bool saturation = true;
  bool odd = true;
  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double se = rng.Uniform(0.05, 0.5);
    const double sa = se + rng.Uniform(0.1, 1.5);
    const double fe = rng.Uniform(0.5, 1.5);
    const double fa = fe * rng.Uniform(0.3, 1.0);
    const double slope = rng.Uniform(1.0, 30.0);
    const FrictionCurve c = FrictionCurve::Fit({0.0, 0.0}, {se, fe}, {sa, fa}, slope);
    const auto& p = c.pieces();
    for (double e : {p[0].Value(0.0), p[0].Slope(0.0) - slope, p[0].Value(se) - fe,
                     p[0].Slope(se), p[1].Value(se) - fe, p[1].Slope(se), p[1].Value(sa) - fa,
                     p[1].Slope(sa)}) {
      worst = std::max(worst, std::abs(e));
    }
    for (int k = 0; k < 20; ++k) {
      const double s = sa + rng.Uniform(0.0, 100.0);
      saturation &= c.Evaluate(s) == fa && c.Evaluate(-s) == -fa;
      const double x = rng.Uniform(0.0, 3.0);
      odd &= c.Evaluate(-x) == -c.Evaluate(x);
    }
  }
  v.Require(worst <= 1e-9, Fmt("worst anchor residual %.1e <= 1e-9", worst));
  v.Require(saturation, "saturation exact");
  v.Require(odd, "odd symmetry exact");
  return v;
}

Verdict StaticsPassivity() {
  Verdict v;
  const VehicleConfig cfg = VehicleConfig::Default();
  VehicleState s = SettledState(cfg);
  for (auto& c : s.corners) {
    c.sprung_height += 0.005;
    c.wheel_height += 0.005;
  }
  s = Drive(s, cfg, {}, 5.0);
  double worst = 0.0;
  for (const auto& c : s.corners) {
    const double weight = c.sprung_mass * cfg.gravity;
    worst = std::max(worst, std::abs(c.preload - c.spring_k * c.deflection() - weight) / weight);
  }
  v.Require(worst < 0.01, Fmt("settle: worst corner |K*defl - weight|/weight %.2e < 1%%", worst));

  s = Drive(SettledState(cfg), cfg, {0.8, 0.6}, 3.0);
  for (auto& c : s.corners) c.sprung_rate += 0.05;
  double e = MechanicalEnergy(s, cfg);
  double worst_rise = -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(10.0 / kDt);
  for (int i = 0; i < n; ++i) {
    s = Step(s, cfg, {}, kDt);
    const double e1 = MechanicalEnergy(s, cfg);
    worst_rise = std::max(worst_rise, e1 - e);
    e = e1;
  }
  v.Require(worst_rise <= 1e-12, Fmt("zero input 10 s: largest per-step energy change %.2e J", worst_rise));
  return v;
}

Verdict LidarEncoder() {
  Verdict v;
  const LidarSpec spec;
  const LidarScan scan = ScanScene(SquareRoom(), {1.0, 1.0, 0.0}, spec);
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(scan.ranges.size()); ++i) {
    const double th = i * kTwoPi / 360.0;
    const double c = std::abs(std::cos(th)), s = std::abs(std::sin(th));
    const double expected = std::min(c > 0 ? 1.0 / c : 1e300, s > 0 ? 1.0 / s : 1e300);
    worst = std::max(worst, std::abs(scan.ranges[i] - expected));
  }
  v.Require(scan.ranges.size() == 360, std::to_string(scan.ranges.size()) + " beams");
  v.Require(worst <= 1e-6, Fmt("worst beam error %.1e m", worst));

  // Noisy scans from a running simulation: limits and cadence.
  SimulationConfig cfg;
  cfg.scene = SquareRoom();
  cfg.scene.spawn = {0.6, 1.0, 0.0};
  cfg.noise = NoiseConfig{};
  cfg.noise.seed = 5;
  cfg.noise.lidar_sigma = 0.5;
  Simulation sim(cfg);
  int scans = 0;
  bool clamps = true;
  bool encoder = true;
  bool crossed = false;
  std::int64_t prev_count = 0;
  for (int i = 0; i < 5000; ++i) {
    sim.SetCommand({0.5, 0.8});
    const SensorFrame& f = sim.Tick();
    if (f.lidar) {
      ++scans;
      for (double r : f.lidar->ranges) {
        clamps &= std::isinf(r) || (r >= spec.range_min && r <= spec.range_max);
      }
    }
    const double angle = sim.state().wheels[kRearLeft].cumulative_angle;
    if (!crossed && angle >= kTwoPi) {
      crossed = true;
      encoder &= f.encoder_left >= 1920 && prev_count < 1920;
    }
    prev_count = f.encoder_left;
  }
  v.Require(clamps, "ranges within [0.15, 12] m or no-return");
  v.Require(scans == 70, std::to_string(scans) + " scans in 10 s simulated");
  encoder &= crossed && EncoderRead(kTwoPi) == 1920;
  v.Require(encoder, "1 rev -> " + std::to_string(EncoderRead(kTwoPi)) + " ticks");
  return v;
}

// Textbook Dijkstra over the same 8-connected, corner-cutting-free graph with
// cost counted as (straight, diagonal) steps so equality is exact.
double DijkstraCost(const BlockedGrid& g, GridIndex s, GridIndex t) {
  const int n = g.width * g.height;
  std::vector<long> st(n, -1), dg(n, -1);
  std::vector<bool> done(n, false);
  auto cost = [&](int i) { return st[i] + dg[i] * std::sqrt(2.0); };
  st[s.y * g.width + s.x] = 0;
  dg[s.y * g.width + s.x] = 0;
  while (true) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (!done[i] && st[i] >= 0 && (u < 0 || cost(i) < cost(u))) u = i;
    }
    if (u < 0) return -1.0;
    done[u] = true;
    const int ux = u % g.width, uy = u / g.width;
    if (ux == t.x && uy == t.y) return cost(u);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const GridIndex w{ux + dx, uy + dy};
        if (!g.Free(w)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && (!g.Free({ux + dx, uy}) || !g.Free({ux, uy + dy}))) continue;
        const int j = w.y * g.width + w.x;
        const long ns = st[u] + (diag ? 0 : 1), nd = dg[u] + (diag ? 1 : 0);
        if (st[j] < 0 || ns + nd * std::sqrt(2.0) < cost(j)) {
          st[j] = ns;
          dg[j] = nd;
        }
      }
    }
  }
}

Verdict AStar() {
  Verdict v;
  RngStream rng(2026);
  int equal = 0, reachable = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 2 + static_cast<int>(rng.UniformIndex(49));
    const int h = 2 + static_cast<int>(rng.UniformIndex(49));
    BlockedGrid g(w, h);
    const double density = rng.Uniform(0.0, 0.45);
    for (auto&& b : g.blocked) b = rng.Uniform() < density;
    const GridIndex s{static_cast<int>(rng.UniformIndex(w)), static_cast<int>(rng.UniformIndex(h))};
    const GridIndex t{static_cast<int>(rng.UniformIndex(w)), static_cast<int>(rng.UniformIndex(h))};
    g.Set(s, false);
    g.Set(t, false);
    const GridSearchResult a = AStarSearch(g, s, t, true);
    const double oracle = DijkstraCost(g, s, t);
    reachable += oracle >= 0.0;
    equal += (a.found == (oracle >= 0.0)) && (!a.found || a.cost() == oracle);
  }
  v.Require(equal == 200, std::to_string(equal) + "/200 grids equal to Dijkstra (" +
                              std::to_string(reachable) + " reachable)");
  return v;
}

Verdict Mcl() {
  Verdict v;
  Scene room = SquareRoom();
  room.obstacles = {{{1.45, 1.5}, {0.3, 0.2}, 0.0, false}};
  room.spawn = {0.5, 0.6, 0.0};
  OccupancyGrid grid = OccupancyGrid::ForBounds(room.bounds);
  for (const Pose2& p : std::vector<Pose2>{{1.0, 1.0, 0.0}, {0.5, 0.5, 0.0}, {1.5, 0.5, 0.0},
                                           {0.5, 1.5, 0.0}}) {
    for (int k = 0; k < 3; ++k) grid.Insert(p, ScanScene(room, p, {}));
  }
  int converged = 0;
  std::string errs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimulationConfig cfg;
    cfg.scene = room;
    cfg.noise = NoiseConfig{};
    cfg.noise.seed = seed;
    Simulation sim(cfg);
    ParticleFilter pf(grid, {}, RngStream::ForChannel(seed, "mcl"));
    pf.InitializeUniform(2000);
    SensorFrame last = sim.frame();
    for (int updates = 0; updates < 30;) {
      sim.SetCommand({0.6, 0.4});
      const SensorFrame& f = sim.Tick();
      if (!f.lidar) continue;
      pf.Update(OdometryUpdate(last, f, cfg.vehicle.wheel.radius), &*f.lidar);
      last = f;
      ++updates;
    }
    const double err = Norm(pf.Estimate().position() - sim.state().pose.position());
    converged += err < 0.04;
    errs += (errs.empty() ? "" : " ") + Fmt("%.3f", err);
  }
  v.Require(converged >= 9, std::to_string(converged) + "/10 seeds < 0.04 m (errors " + errs + ")");
  return v;
}

Verdict Parking() {
  Verdict v;
  const Scene scene = LoadSceneFile(DataDir() / "scenes" / "parking_school.json");
  int ok = 0;
  std::string fails;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ParkRunResult r = RunParkingMission(ParkingSchoolRun(scene, seed, true));
    const bool good = r.parked && r.position_error <= 0.05 && r.heading_error <= 0.1 &&
                      r.collisions == 0;
    ok += good;
    if (!good) fails += " seed" + std::to_string(seed) + ":" + (r.failure.empty() ? "tol" : r.failure);
  }
  v.Require(ok >= 8, std::to_string(ok) + "/10 seeds PARKED within (0.05 m, 0.1 rad), 0 collisions" + fails);
  return v;
}

double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

Verdict BehaviorCloning() {
  Verdict v;
  {
    Mlp m = Mlp::Random({37, 64, 32, 16, 2}, 7);
    RngStream rng(107);
    for (int l = 0; l < m.num_layers(); ++l) {
      for (Eigen::Index i = 0; i < m.bias(l).size(); ++i) m.bias(l)(i) = rng.Uniform(-0.5, 0.5);
    }
    Eigen::MatrixXd x(37, 8), y(2, 8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform(-1.0, 1.0);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.Uniform(-1.0, 1.0);
    MlpGradients g;
    MseLoss(m, x, y, &g);
    const double h = 1e-5;
    double worst = 0.0;
    auto check = [&](double& p, double analytic) {
      const double saved = p;
      p = saved + h;
      const double up = MseLoss(m, x, y);
      p = saved - h;
      const double down = MseLoss(m, x, y);
      p = saved;
      worst = std::max(worst, RelativeError(analytic, (up - down) / (2.0 * h)));
    };
    for (int l = 0; l < m.num_layers(); ++l) {
      for (Eigen::Index i = 0; i < m.weights(l).size(); ++i) {
        check(m.weights(l).data()[i], g.weights[l].data()[i]);
      }
      for (Eigen::Index i = 0; i < m.bias(l).size(); ++i) check(m.bias(l)(i), g.biases[l](i));
    }
    v.Require(worst < 1e-4, Fmt("gradient check worst rel err %.1e", worst));
  }

  const Scene scene = LoadSceneFile(DataDir() / "scenes" / "driving_school.json");
  DemoRecordConfig rc;
  rc.scene = scene;
  rc.noise = NoiseConfig{};
  rc.noise.seed = 1;
  rc.seed = 1;
  rc.laps = 5;
  const DemoRecordResult rec = RecordDemonstration(rc);
  BcTrainConfig tc;
  tc.train.seed = 1;
  const BcTrainResult tr = TrainBehaviorCloning(rec.rows, rc.features, tc);
  const auto& lc = tr.loss_curve;
  const double ratio = lc.size() == 4 ? lc[3] / lc[0] : 1.0;
  v.Require(rec.laps >= 5 && lc.size() == 4 && ratio < 0.5,
            std::to_string(rec.laps) + " laps, " + std::to_string(rec.rows.size()) + " rows; " +
                Fmt("loss %.4f -> %.4f", lc.front(), lc.back()) + Fmt(" (ratio %.3f < 0.5)", ratio));

  int clean = 0;
  for (int seed = 0; seed < 10; ++seed) {
    DriveEvalConfig ec;
    ec.scene = scene;
    ec.noise = NoiseConfig{};
    ec.noise.seed = 100 + seed;
    clean += EvaluateDriver(tr.model, ec).clean_laps >= 1;
  }
  v.Require(clean >= 7, std::to_string(clean) + "/10 seeds with a collision-free lap");
  return v;
}

Verdict Determinism() {
  Verdict v;
  const Scene scene = LoadSceneFile(DataDir() / "scenes" / "parking_school.json");
  std::ostringstream a, b;
  RunParkingMission(ParkingSchoolRun(scene, 7, true), &a);
  RunParkingMission(ParkingSchoolRun(scene, 7, true), &b);
  v.Require(!a.str().empty() && a.str() == b.str(),
            "seed 7 mission logs " + std::string(a.str() == b.str() ? "identical" : "differ") +
                " (" + std::to_string(a.str().size()) + " bytes)");
  return v;
}

struct Criterion {
  const char* name;
  double limit_s;  // 0 for none
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"actuators", 5.0, Actuators},
      {"ackermann", 0.0, Ackermann},
      {"tire-spline", 0.0, TireSpline},
      {"statics-passivity", 0.0, StaticsPassivity},
      {"lidar-encoder", 0.0, LidarEncoder},
      {"astar-dijkstra", 10.0, AStar},
      {"mcl", 60.0, Mcl},
      {"parking", 300.0, Parking},
      {"behavior-cloning", 180.0, BehaviorCloning},
      {"determinism", 0.0, Determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.Require(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = Fmt("%.2f s", secs);
    if (c.limit_s > 0.0) {
      const bool in_time = secs < c.limit_s;
      timing += Fmt(" < %.0f s", c.limit_s) + (in_time ? "" : " [X]");
      if (!in_time) v.pass = false;
    }
    failed += !v.pass;
    std::printf("%s  %-18s %s (%s)\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
