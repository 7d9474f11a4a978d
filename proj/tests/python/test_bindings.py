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

"""Smoke tests for the Python extension module."""

import json

import numpy as np
import pytest

import qabias


@pytest.fixture(scope="module")
def inst8():
    inst = qabias.find_instance(8, master_seed=4)
    assert inst is not None
    return inst


def test_instance_is_certified(inst8):
    assert inst8.m == 6
    best, configs = qabias.brute_force_minima(inst8)
    assert best == 0
    assert configs == [inst8.solution]
    assert inst8.cost(inst8.solution) == 0
    back = qabias.Instance.from_json(inst8.to_json())
    assert back.clauses == inst8.clauses
    assert "n=8" in repr(inst8)


def test_initial_state_single_spin():
    psi = qabias.initial_state(1, [-1.0])
    assert psi.dtype == np.complex128
    assert abs(psi[1]) ** 2 == pytest.approx(0.8535533905932737, abs=1e-12)
    np.testing.assert_allclose(qabias.initial_state(1), [-(0.5 ** 0.5), 0.5 ** 0.5], atol=1e-15)


def test_evolve_matches_oracle():
    inst = qabias.find_instance(4, master_seed=2)
    sched = qabias.Schedule(dt=1e-3)
    fast = qabias.evolve(inst, None, sched)
    ref = qabias.dense_propagator_oracle(inst, None, sched, 5e-4)
    assert fast.shape == (16,)
    assert np.vdot(fast, fast).real == pytest.approx(1.0, abs=1e-9)
    assert abs(np.vdot(ref, fast)) ** 2 > 1 - 1e-6


def test_protocols(inst8):
    sched = qabias.Schedule()
    assert sched.steps == 20000
    assert qabias.run_biased(inst8, inst8.solution, sched).records[0].success_prob > 0.95
    it = qabias.run_iterative(inst8, sched, seed=3)
    assert it.steps_used == len(it.records) >= 2
    assert it.terminated_by in ("fixed-point", "step-cap")
    ab = qabias.run_antibias(inst8, sched, seed=3, h=0.1, max_steps=50)
    assert ab.terminated_by in ("solution-found", "step-cap")
    for rec in ab.records:
        assert rec.sampled_cost == inst8.cost(rec.sampled_config)
    assert ab.records[0].bias == [0.0] * 8


def test_adiabatic_run():
    inst = qabias.find_instance(6, master_seed=1)
    rec = qabias.run_standard(inst, qabias.Schedule(tau=30.0)).records[0]
    assert rec.success_prob > 0.99
    assert rec.final_config == inst.solution


def test_input_errors_raise_value_error(inst8):
    with pytest.raises(ValueError):
        qabias.Schedule(tau=-1.0)
    with pytest.raises(ValueError):
        qabias.run_biased(inst8, "101", qabias.Schedule())
    with pytest.raises(ValueError):
        qabias.Instance.from_json("{}")


def test_sweep(tmp_path):
    spec = {"sizes": [6], "instances_per_size": 3, "protocols": ["standard", "antibias"],
            "schedule": {"dt": 0.005}, "out": str(tmp_path / "out")}
    result = qabias.run_sweep(json.dumps(spec))
    assert result["complete"]
    assert result["instances_total"] == 3
    assert (tmp_path / "out" / "runs.csv").exists()
