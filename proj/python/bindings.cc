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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "minicar/autonomy/planner.h"
#include "minicar/core/error.h"
#include "minicar/dynamics/friction_curve.h"
#include "minicar/dynamics/vehicle_model.h"
#include "minicar/imitation/behavior_cloning.h"
#include "minicar/sensors/sensors.h"
#include "minicar/sim/park.h"
#include "minicar/sim/simulation.h"

namespace py = pybind11;
using namespace minicar;

namespace {

// Dicts cross the boundary as JSON text through the stdlib json module.
py::object ToPy(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json FromPy(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Scene SceneArg(const py::object& o) {
  if (py::isinstance<py::dict>(o)) return LoadScene(FromPy(o));
  return LoadSceneFile(o.cast<std::filesystem::path>());
}

NoiseConfig NoiseArg(const py::object& o, std::uint64_t seed) {
  NoiseConfig n;
  if (o.is_none()) {
    n = NoiseConfig::Off();
  } else if (py::isinstance<py::str>(o) && o.cast<std::string>() == "nominal") {
    n = NoiseConfig{};
  } else if (py::isinstance<py::str>(o) && o.cast<std::string>() == "off") {
    n = NoiseConfig::Off();
  } else {
    n = NoiseConfig::FromJson(FromPy(o));
  }
  n.seed = seed;
  return n;
}

Pose2 PoseArg(const std::tuple<double, double, double>& p) {
  return {std::get<0>(p), std::get<1>(p), std::get<2>(p)};
}

}  // namespace

PYBIND11_MODULE(_minicar, m) {
  m.doc() = "minicar core bindings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IntegrationFault>(m, "IntegrationFault", PyExc_RuntimeError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);

  m.def("data_dir", [] { return std::filesystem::path(MINICAR_DATA_DIR); });
  m.def("default_vehicle", [] { return ToPy(VehicleConfig::Default().ToJson()); });
  m.def("validate_vehicle", [](const py::dict& d) {
    return ToPy(VehicleConfig::FromJson(FromPy(d)).ToJson());
  });
  m.def("load_scene", [](const py::object& o) { return ToPy(SceneToJson(SceneArg(o))); },
        py::arg("scene"));

  m.def(
      "ackermann_angles",
      [](double wheelbase, double track, double max_steer, double delta) {
        const AckermannAngles a = ComputeAckermannAngles({wheelbase, track, max_steer}, delta);
        return std::make_pair(a.left, a.right);
      },
      py::arg("wheelbase"), py::arg("track"), py::arg("max_steer"), py::arg("delta"));

  py::class_<FrictionCurve>(m, "FrictionCurve")
      .def(py::init([](std::pair<double, double> extremum, std::pair<double, double> asymptote,
                       double initial_slope) {
             return FrictionCurve::Fit({0.0, 0.0}, {extremum.first, extremum.second},
                                       {asymptote.first, asymptote.second}, initial_slope);
           }),
           py::arg("extremum"), py::arg("asymptote"), py::arg("initial_slope"))
      .def("__call__", &FrictionCurve::Evaluate)
      .def("derivative", &FrictionCurve::Derivative);

  m.def("encoder_read", [](double angle) { return EncoderRead(angle); });
  m.def(
      "scan_scene",
      [](const py::object& scene, std::tuple<double, double, double> pose) {
        return ScanScene(SceneArg(scene), PoseArg(pose), LidarSpec{}).ranges;
      },
      py::arg("scene"), py::arg("pose"));

  m.def(
      "astar",
      [](const std::vector<std::vector<bool>>& blocked, std::pair<int, int> start,
         std::pair<int, int> goal) -> py::object {
        const int h = static_cast<int>(blocked.size());
        const int w = h > 0 ? static_cast<int>(blocked[0].size()) : 0;
        BlockedGrid g(w, h);
        for (int y = 0; y < h; ++y) {
          if (static_cast<int>(blocked[y].size()) != w) throw py::value_error("ragged grid");
          for (int x = 0; x < w; ++x) g.Set({x, y}, blocked[y][x]);
        }
        const GridSearchResult r =
            AStarSearch(g, {start.first, start.second}, {goal.first, goal.second});
        if (!r.found) return py::none();
        std::vector<std::pair<int, int>> cells;
        for (const GridIndex& c : r.cells) cells.emplace_back(c.x, c.y);
        return py::make_tuple(r.cost(), cells);
      },
      py::arg("blocked"), py::arg("start"), py::arg("goal"),
      "Rows are y, columns x. Returns (cost, cells) or None when unreachable.");

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const py::object& scene, const py::object& vehicle, const py::object& noise,
                       std::uint64_t seed, double dt) {
             SimulationConfig c;
             c.scene = SceneArg(scene);
             if (!vehicle.is_none()) c.vehicle = VehicleConfig::FromJson(FromPy(vehicle));
             c.noise = NoiseArg(noise, seed);
             c.dt = dt;
             return Simulation(c);
           }),
           py::arg("scene"), py::arg("vehicle") = py::none(), py::arg("noise") = py::none(),
           py::arg("seed") = 0, py::arg("dt") = 0.002)
      .def("set_command",
           [](Simulation& s, double throttle, double steering) {
             return s.SetCommand({throttle, steering});
           },
           py::arg("throttle"), py::arg("steering"), "Returns True when the command was clamped.")
      .def("tick", [](Simulation& s) { return ToPy(SensorFrameToJson(s.Tick())); })
      .def(
          "run",
          [](Simulation& s, int ticks) {
            for (int i = 0; i < ticks; ++i) s.Tick();
          },
          py::arg("ticks"))
      .def("reset", [](Simulation& s) { s.Reset(); })
      .def("telemetry", [](const Simulation& s) { return ToPy(s.TelemetryJson()); })
      .def_property_readonly("pose",
                             [](const Simulation& s) {
                               const Pose2& p = s.state().pose;
                               return py::make_tuple(p.x, p.y, p.yaw);
                             })
      .def_property_readonly("speed", [](const Simulation& s) { return s.state().v_x; })
      .def_property_readonly("sim_time", &Simulation::sim_time)
      .def_property_readonly("collisions", &Simulation::collision_count)
      .def_property_readonly("in_contact", &Simulation::in_contact);

  m.def(
      "run_parking",
      [](std::uint64_t seed, bool nominal_noise, const py::object& scene,
         std::optional<std::filesystem::path> log) {
        const Scene sc = scene.is_none()
                             ? LoadSceneFile(std::filesystem::path(MINICAR_DATA_DIR) / "scenes" /
                                             "parking_school.json")
                             : SceneArg(scene);
        ParkRunResult r;
        {
          py::gil_scoped_release release;
          if (log) {
            std::ofstream out(*log);
            if (!out) throw ConfigError("cannot write " + log->string());
            r = RunParkingMission(ParkingSchoolRun(sc, seed, nominal_noise), &out);
          } else {
            r = RunParkingMission(ParkingSchoolRun(sc, seed, nominal_noise));
          }
        }
        return ToPy(r.ToJson());
      },
      py::arg("seed") = 0, py::arg("nominal_noise") = true, py::arg("scene") = py::none(),
      py::arg("log") = py::none());

  py::class_<BcModel>(m, "BcModel")
      .def_static("load", &BcModel::Load, py::arg("path"))
      .def_property_readonly("input_size", [](const BcModel& b) { return b.features.size(); })
      .def(
          "predict",
          [](const BcModel& b, const std::vector<double>& f) {
            const DriveCommand c = b.Predict(f);
            return py::make_tuple(c.throttle, c.steering);
          },
          py::arg("features"), "Returns (throttle, steering).")
      .def("to_dict", [](const BcModel& b) { return ToPy(b.ToJson()); });
}
