"""The compiled and fallback integrator paths must agree bit-for-bit."""

import json
import os
import subprocess
import sys

import pytest

from auvsim._accel import NUMBA_ENABLED

WORKLOAD = r"""
import json
from auvsim._accel import NUMBA_ENABLED
from auvsim.autopilot import PidGains
from auvsim.params import load_default_params
from auvsim.trial import TrialConfig, run_trial

cfg = TrialConfig(duration=10.0, gains=PidGains(5.0),
                  disturbance_yaw_moment=-57.0)
rec = run_trial(load_default_params(), cfg)
print(json.dumps({
    "numba": NUMBA_ENABLED,
    "yaw": [s.yaw for s in rec.samples],
    "commands": [s.commands for s in rec.samples],
}))
"""


def run_backend(backend):
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD],
        env={**os.environ, "AUVSIM_BACKEND": backend},
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend unavailable")
def test_backends_bit_identical():
    numba_run = run_backend("numba")
    numpy_run = run_backend("numpy")
    assert numba_run["numba"] is True
    assert numpy_run["numba"] is False
    assert numba_run["yaw"] == numpy_run["yaw"]
    assert numba_run["commands"] == numpy_run["commands"]
