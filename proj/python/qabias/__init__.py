# Copyright 2026 The qabias Authors
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

"""Quantum annealing with longitudinal bias fields on exact-cover instances."""

from ._core import (
    Instance,
    ProtocolResult,
    RunRecord,
    Schedule,
    __version__,
    brute_force_minima,
    dense_propagator_oracle,
    evolve,
    find_instance,
    initial_state,
    load_instance,
    run_antibias,
    run_biased,
    run_iterative,
    run_standard,
    run_sweep,
    save_instance,
)

__all__ = [
    "Instance",
    "ProtocolResult",
    "RunRecord",
    "Schedule",
    "__version__",
    "brute_force_minima",
    "dense_propagator_oracle",
    "evolve",
    "find_instance",
    "initial_state",
    "load_instance",
    "run_antibias",
    "run_biased",
    "run_iterative",
    "run_standard",
    "run_sweep",
    "save_instance",
]
