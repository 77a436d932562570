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

"""Python bindings for the minicar simulator core."""

from ._minicar import (
    BcModel,
    ConfigError,
    FrictionCurve,
    IntegrationFault,
    ParseError,
    PlanningError,
    Simulation,
    ValidationError,
    ackermann_angles,
    astar,
    data_dir,
    default_vehicle,
    encoder_read,
    load_scene,
    run_parking,
    scan_scene,
    validate_vehicle,
)

__version__ = "0.1.0"

__all__ = [
    "BcModel",
    "ConfigError",
    "FrictionCurve",
    "IntegrationFault",
    "ParseError",
    "PlanningError",
    "Simulation",
    "ValidationError",
    "ackermann_angles",
    "astar",
    "data_dir",
    "default_vehicle",
    "encoder_read",
    "load_scene",
    "run_parking",
    "scan_scene",
    "validate_vehicle",
]
