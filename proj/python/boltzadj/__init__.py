# Copyright 2026 The boltzadj Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Adjoint DSMC gradients for the homogeneous Boltzmann equation."""

from ._boltzadj import (
    BoltzadjError,
    ConfigError,
    FdOptions,
    GradientReport,
    GridSchemeOptions,
    InitialCondition,
    IoError,
    Objective,
    OptOptions,
    ParameterError,
    SimConfig,
    fd_gradient,
    gradient,
    RunConfig,
    load_config,
    optimize,
    run_forward,
)

__all__ = [
    "BoltzadjError",
    "ConfigError",
    "FdOptions",
    "GradientReport",
    "GridSchemeOptions",
    "InitialCondition",
    "IoError",
    "Objective",
    "OptOptions",
    "ParameterError",
    "SimConfig",
    "fd_gradient",
    "gradient",
    "RunConfig",
    "load_config",
    "optimize",
    "run_forward",
]
