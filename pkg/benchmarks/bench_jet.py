"""Compare the compiled and pure-Python tape Hessian kernels.

Run with ``python benchmarks/bench_jet.py [--repeat N]``.
"""

import argparse
import time

import numpy as np

from nullity_forge.expr import compile_tape, parse
from nullity_forge.kernels import BACKEND, tape_hessian

CASES = {
    "warped-5d": ("exp(2*x0)*sin(x1)^2*cos(x3)^2 + sqrt(1 + x2^2)*cosh(x4)", 5),
    "polynomial-3d": ("2 + 0.1*x0*x1 - 0.03*x2^2 + 0.07*x0*x2 + 0.02*x1^2", 3),
    "hopf-3d": ("cos(x0)^2 + sin(x0)^2*cos(x1)^2/(1 + x2^2)", 3),
}


def bench(tape, points, backend):
    t0 = time.perf_counter()
    for p in points:
        tape_hessian(tape, p, backend)
    return (time.perf_counter() - t0) / len(points)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = ["python"] + (["cython"] if BACKEND == "cython" else [])
    print(f"{'case':16s}" + "".join(f"{b:>16s}" for b in backends) + "     speedup")
    for name, (src, n) in CASES.items():
        tape = compile_tape(parse(src, n))
        pts = rng.uniform(0.2, 0.8, size=(args.repeat, n))
        ref = tape_hessian(tape, pts[0], "python")
        times = {}
        for b in backends:
            got = tape_hessian(tape, pts[0], b)
            assert all(np.allclose(x, y, rtol=1e-13, atol=1e-15) for x, y in zip(ref, got))
            times[b] = bench(tape, pts, b)
        speed = f"{times['python'] / times['cython']:10.1f}x" if "cython" in times else "         -"
        print(f"{name:16s}" + "".join(f"{times[b] * 1e6:13.2f} us" for b in backends) + speed)


if __name__ == "__main__":
    main()
