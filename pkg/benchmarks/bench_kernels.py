"""Compare the numba kernels against the pure-numpy fallback.

Runs the same round-trip workload in two subprocesses, one with
CASPHERE_NUMBA=1 and one with CASPHERE_NUMBA=0, and reports per-call
medians.  The first jitted call pays the compile cost, so each worker
warms up before timing.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

_WORKER = """
import json, os, statistics, sys, time
from casphere.materials import MirrorSpec
from casphere.roundtrip import ComputeConfig, Geometry, logdet_xi
from casphere._accel import USE_NUMBA

repeat = int(sys.argv[1])
plasma = MirrorSpec.plasma(lambda_p=136e-9)
geom = Geometry(5e-7, 1e-7)
xi = 0.5 * 299792458.0 / geom.center_distance

# warm up: triggers jit compilation and any lazy table setup
logdet_xi(geom, plasma, plasma, xi, ComputeConfig(lmax=8))

out = {"numba": USE_NUMBA}
for lmax in (20, 40, 60):
    cfg = ComputeConfig(lmax=lmax)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        logdet_xi(geom, plasma, plasma, xi, cfg)
        times.append(time.perf_counter() - t0)
    out[f"lmax{lmax}"] = statistics.median(times)
print(json.dumps(out))
"""


def _run(flag: str, repeat: int) -> dict:
    env = dict(os.environ, CASPHERE_NUMBA=flag)
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().split("\n")[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    jit = _run("1", args.repeat)
    plain = _run("0", args.repeat)
    if not jit["numba"]:
        print("note: numba not importable, both columns ran the numpy path")

    print(f"{'workload':<12} {'numba [ms]':>12} {'numpy [ms]':>12} {'speedup':>9}")
    for key in ("lmax20", "lmax40", "lmax60"):
        tj, tp = jit[key] * 1e3, plain[key] * 1e3
        print(f"{key:<12} {tj:>12.2f} {tp:>12.2f} {tp / tj:>8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
