"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own subprocess (the backend is fixed at import time
by ``ALGACT_NO_NUMBA``). Every workload runs once to warm up (JIT compile for
numba), then ``--repeat`` more times; the best time is reported. Results are
hashed so the two backends can be checked for bitwise agreement.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time


def _workloads():
    import numpy as np

    from algact import GroupDescriptor, preset
    from algact.inverse import SolverConfig, solve
    from algact.measures import MuSpec, monte_carlo_fourier, sample_windows
    from algact.parse import parse_matrix, parse_vector

    Z = GroupDescriptor.parse("Z")
    Z2 = GroupDescriptor.parse("Z^2")
    harm = preset("harmonic-f2")
    xi_h = solve(harm.f, SolverConfig(radius=6, method="cg-normal"))
    xi_z = solve(parse_matrix(Z, "3e-g-g^2"), SolverConfig(radius=40))
    f_z2 = parse_matrix(Z2, "6e-g-h-g^-1-h^-1")

    def h(a):
        return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()[:16]

    return {
        "neumann Z^2 R=10": lambda: h(solve(f_z2, SolverConfig(radius=10)).coeffs),
        "cg-normal F2 R=6": lambda: h(solve(harm.f, SolverConfig(radius=6, method="cg-normal")).coeffs),
        "sample F2 m=3 N=2000 window=2": lambda: h(sample_windows(MuSpec(3, xi_h), 2, 2000, 1)[1]),
        "mc Z m=3 N=1e5": lambda: repr(monte_carlo_fourier(MuSpec(3, xi_z), parse_vector(Z, "2e-g"), 100_000, 1).mc_estimate),
        "mc F2 m=3 N=1e5": lambda: repr(monte_carlo_fourier(MuSpec(3, xi_h), parse_vector(harm.group, "e"), 100_000, 1).mc_estimate),
    }


def worker(repeat: int) -> dict:
    from algact import kernels

    out = {"backend": kernels.BACKEND, "results": {}}
    for name, fn in _workloads().items():
        t0 = time.perf_counter()
        digest = fn()
        first = time.perf_counter() - t0
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["results"][name] = {"first": first, "best": best, "digest": digest}
    return out


def run(backend: str, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("ALGACT_NO_NUMBA", None)
    if backend == "numpy":
        env["ALGACT_NO_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write raw timings here")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return 0

    nb, npy = run("numba", args.repeat), run("numpy", args.repeat)
    if nb["backend"] != "numba":
        print("numba unavailable; only the numpy backend was timed", file=sys.stderr)
    print(f"{'workload':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}  same")
    mismatch = 0
    for name, r in nb["results"].items():
        q = npy["results"][name]
        same = r["digest"] == q["digest"]
        mismatch += not same
        print(f"{name:34s} {r['best']:10.4f} {q['best']:10.4f} {q['best'] / r['best']:8.1f}x  {'yes' if same else 'NO'}")
    print(f"numba first-call times include JIT: " + ", ".join(f"{v['first']:.2f}" for v in nb["results"].values()))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"numba": nb, "numpy": npy}, fh, indent=2, sort_keys=True)
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
