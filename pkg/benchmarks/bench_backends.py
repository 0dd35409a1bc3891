"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_backends.py [--repeat 5] [--trials 20000]
"""

import argparse
import timeit
from importlib import resources

import numpy as np

from qef import _backend, gf2
from qef.code import ea_extend, load_matrix, random_dual_containing
from qef.encoder import synth_nonft
from qef.faults import count_events, fault_locations, sample_faults


def workloads(trials: int):
    data = resources.files("qef") / "data"
    ea = ea_extend(load_matrix(data / "example_hx.txt"), load_matrix(data / "example_hz.txt"))
    enc = synth_nonft(ea).encoder
    locs = fault_locations(enc, ea.receiver_cols, "group")
    faults = sample_faults(np.random.default_rng(1), trials, len(locs), 0.05)
    big = np.random.default_rng(2).integers(0, 2, size=(256, 512), dtype=np.uint8)
    h1, h2 = random_dual_containing(20, 6, seed=3)
    return {
        "rref 256x512": lambda k: k.rref_words(gf2.pack_rows(big), 512, 512),
        f"frames {trials} trials": lambda k: _frames(k, enc, faults, locs),
        "distance n=20": lambda k: _distance(k, h1, h2),
    }


def _frames(k, enc, faults, locs):
    saved = _backend_swap(k)
    try:
        return count_events(enc, faults, locs)
    finally:
        _backend_swap(saved)


def _distance(k, h1, h2):
    from qef import code

    saved = _backend_swap(k)
    try:
        return code.brute_force_distance(code.build_css(h1, h2))
    finally:
        _backend_swap(saved)


def _backend_swap(k):
    import qef.code
    import qef.faults

    old = qef.faults.kernels
    qef.faults.kernels = k
    qef.code.kernels = k
    return old


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20000)
    args = ap.parse_args()
    compiled = _backend.load("compiled")
    python = _backend.load("python")
    if compiled is python:
        print("compiled extension not built; only the python backend is available")
    print(f"{'workload':24s} {'compiled s':>11s} {'python s':>11s} {'speedup':>8s}")
    for name, fn in workloads(args.trials).items():
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(python), number=1, repeat=args.repeat))
        print(f"{name:24s} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
