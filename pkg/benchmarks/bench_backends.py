#!/usr/bin/env python3
"""Compare the compiled and pure-numpy integrator backends.

Runs the same heading-lock trial workload in a subprocess per backend
(the backend is chosen at import time, so each needs a fresh
interpreter) and reports wall time and speedup. The first compiled run
includes numba's compilation cost; a warmup trial is timed out of band.
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from auvsim._accel import NUMBA_ENABLED
from auvsim.autopilot import PidGains
from auvsim.params import load_default_params
from auvsim.trial import TrialConfig, run_trial

duration, repeats = float(sys.argv[1]), int(sys.argv[2])
pset = load_default_params()
cfg = TrialConfig(duration=duration, gains=PidGains(5.0),
                  disturbance_yaw_moment=-57.0)

t0 = time.perf_counter()
run_trial(pset, cfg)  # warmup: numba compile + caches
warmup = time.perf_counter() - t0

best = min(
    (lambda s: (run_trial(pset, cfg), time.perf_counter() - s)[1])(time.perf_counter())
    for _ in range(repeats)
)
final = run_trial(pset, cfg).samples[-1]
print(json.dumps({
    "numba": NUMBA_ENABLED,
    "warmup_s": warmup,
    "best_s": best,
    "final_error_deg": final.error,
}))
"""


def run_backend(backend: str, duration: float, repeats: int) -> dict:
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(duration), str(repeats)],
        env={**os.environ, "AUVSIM_BACKEND": backend},
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=60.0,
                    help="simulated seconds per trial")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timed repetitions per backend (best is reported)")
    args = ap.parse_args()

    results = {}
    for backend in ("numpy", "numba"):
        print("running %s backend ..." % backend, flush=True)
        results[backend] = run_backend(backend, args.duration, args.repeats)

    if not results["numba"]["numba"]:
        print("warning: numba not importable; both runs used the numpy path")
    for backend, r in results.items():
        print(
            "%-6s best %.3f s for a %.0f s trial (warmup incl. compile %.3f s)"
            % (backend, r["best_s"], args.duration, r["warmup_s"])
        )
    same = (results["numpy"]["final_error_deg"]
            == results["numba"]["final_error_deg"])
    print("final heading error identical across backends: %s" % same)
    print(
        "speedup: %.1fx" % (results["numpy"]["best_s"] / results["numba"]["best_s"])
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
