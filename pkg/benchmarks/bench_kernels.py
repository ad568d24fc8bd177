"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from QBOUNDS_NUMBA. Compilation is excluded: every kernel is
called once before timing.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from qbounds import _accel, _kernels
from qbounds.bounds import ncrb_general
from qbounds.linalg import psd_sqrt
from qbounds.randomgen import SeededRng, random_problem

repeat = int(sys.argv[1])
rng = SeededRng(1)
problem = random_problem(4, rng)
rho, sqrt_rho = problem.rho, psd_sqrt(problem.rho)
X1, X2 = problem.drho
p = np.full(6, 1 / 6)
dp = rng.generator.standard_normal((2, 6))
small = random_problem(3, SeededRng(2))

cases = {
    "eigh d=4": lambda: _kernels.eigh(rho),
    "ncrb value+grad d=4": lambda: _kernels.ncrb_value_grad(X1, X2, rho, sqrt_rho, 1.0, 0.0, 1.0, 1.0, 1e-4),
    "hcrb value+grad d=4": lambda: _kernels.hcrb_value_grad(X1, X2, rho, sqrt_rho, 1.0, 0.0, 1.0, 1.0, 1e-4),
    "classical fisher m=6": lambda: _kernels.fisher_from_probabilities(p, dp, 1e-12),
    "ncrb_general d=3 (full solve)": lambda: ncrb_general(small),
}
out = {"numba": _accel.USE_NUMBA}
for name, fn in cases.items():
    fn()
    n = repeat if "full solve" not in name else max(1, repeat // 1000)
    start = time.perf_counter()
    for _ in range(n):
        fn()
    out[name] = (time.perf_counter() - start) / n
print(json.dumps(out))
"""


def run(flag: str, repeat: int) -> dict:
    env = dict(os.environ, QBOUNDS_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    args = parser.parse_args()
    jit = run("1", args.repeat)
    ref = run("0", args.repeat)
    if not jit.pop("numba"):
        print("numba is not importable; both columns use the numpy path")
    ref.pop("numba")
    print(f"{'kernel':32s} {'numba [us]':>12s} {'numpy [us]':>12s} {'speedup':>8s}")
    for name in jit:
        a, b = jit[name] * 1e6, ref[name] * 1e6
        print(f"{name:32s} {a:12.2f} {b:12.2f} {b / a:8.2f}")


if __name__ == "__main__":
    start = time.perf_counter()
    main()
    print(f"total {time.perf_counter() - start:.1f}s")
