# Copyright 2026 The Minicar Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import heapq
import json
import math
import os

import pytest

import minicar


def square_room(side=2.0):
    return {
        "name": "room",
        "bounds": [0, 0, side, side],
        "walls": [[0, 0, side, 0], [side, 0, side, side], [side, side, 0, side], [0, side, 0, 0]],
        "obstacles": [],
        "centerline": [],
        "spawn": [side / 2, side / 2, 0],
    }


def test_ackermann_matches_formula():
    left, right = minicar.ackermann_angles(0.2, 0.15, math.pi / 6, math.pi / 6)
    t = math.tan(math.pi / 6)
    assert left == pytest.approx(math.atan(0.4 * t / (0.4 + 0.15 * t)), abs=1e-12)
    assert right == pytest.approx(math.atan(0.4 * t / (0.4 - 0.15 * t)), abs=1e-12)
    mleft, mright = minicar.ackermann_angles(0.2, 0.15, math.pi / 6, -math.pi / 6)
    assert (mleft, mright) == (-right, -left)


def test_friction_curve_shape():
    f = minicar.FrictionCurve((0.2, 1.0), (0.8, 0.75), 10.0)
    assert f(0.2) == pytest.approx(1.0, abs=1e-9)
    assert f(5.0) == 0.75
    assert f(-0.3) == -f(0.3)
    with pytest.raises(minicar.ConfigError):
        minicar.FrictionCurve((0.9, 1.0), (0.8, 0.75), 10.0)


def test_encoder_one_revolution():
    assert minicar.encoder_read(2 * math.pi) == 1920


def test_scan_square_room():
    ranges = minicar.scan_scene(square_room(), (1.0, 1.0, 0.0))
    assert len(ranges) == 360
    assert ranges[0] == pytest.approx(1.0, abs=1e-9)
    assert ranges[45] == pytest.approx(math.sqrt(2), abs=1e-9)


def dijkstra(grid, start, goal):
    h, w = len(grid), len(grid[0])
    free = lambda x, y: 0 <= x < w and 0 <= y < h and not grid[y][x]
    dist = {start: 0.0}
    heap = [(0.0, start)]
    while heap:
        d, (x, y) = heapq.heappop(heap)
        if (x, y) == goal:
            return d
        if d > dist[(x, y)]:
            continue
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if (dx, dy) == (0, 0) or not free(x + dx, y + dy):
                    continue
                if dx and dy and not (free(x + dx, y) and free(x, y + dy)):
                    continue
                nd = d + (math.sqrt(2) if dx and dy else 1.0)
                if nd < dist.get((x + dx, y + dy), math.inf):
                    dist[(x + dx, y + dy)] = nd
                    heapq.heappush(heap, (nd, (x + dx, y + dy)))
    return None


def test_astar_detour_and_unreachable():
    grid = [[False] * 5 for _ in range(5)]
    for y in range(4):
        grid[y][2] = True
    cost, cells = minicar.astar(grid, (0, 0), (4, 0))
    assert cells[0] == (0, 0) and cells[-1] == (4, 0)
    assert all(not grid[y][x] for x, y in cells)
    assert cost == pytest.approx(dijkstra(grid, (0, 0), (4, 0)), abs=1e-9)
    grid[4][2] = True
    assert minicar.astar(grid, (0, 0), (4, 0)) is None


def test_vehicle_round_trip_and_keyed_error():
    v = minicar.default_vehicle()
    assert minicar.validate_vehicle(v) == v
    with open(os.path.join(minicar.data_dir(), "vehicle_default.json")) as fh:
        assert json.load(fh) == v
    v["suspension"]["spring_k"] = -1
    with pytest.raises(minicar.ConfigError, match="spring_k"):
        minicar.validate_vehicle(v)


def test_scene_errors_name_the_key():
    bad = square_room()
    del bad["bounds"]
    with pytest.raises(minicar.ParseError, match="bounds"):
        minicar.load_scene(bad)


def test_simulation_ticks_and_clamps():
    sim = minicar.Simulation(square_room(), noise="nominal", seed=3)
    sim.set_command(0.0, 0.0)
    assert sim.set_command(2.0, 0.0) is True
    scans = 0
    for _ in range(500):
        frame = sim.tick()
        scans += frame.get("lidar") is not None
    assert scans == 7
    assert sim.sim_time == pytest.approx(1.0)
    tel = sim.telemetry()
    assert tel["throttle_fb"] == 1.0
    assert tel["truth"]["pose"] == list(sim.pose)
    assert sim.speed > 0.1


def test_parking_and_log_determinism(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    ra = minicar.run_parking(seed=7, log=a)
    minicar.run_parking(seed=7, log=b)
    assert ra["verdict"] == "PARKED"
    assert ra["position_error"] < 0.05
    assert a.read_bytes() == b.read_bytes()
