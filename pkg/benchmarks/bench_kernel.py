"""Throughput of the Monte-Carlo tally kernels (pairs per second).

    python benchmarks/bench_kernel.py --pairs 2000000 --repeat 3

Both backends are run on the same setup and seed; their counts must agree
exactly, so the benchmark doubles as a cross-check.
"""
import argparse
import math
import time

from franson_gup.core import CascadeSpec, InterferometerConfig, ModeCoefficients
from franson_gup.montecarlo import MCSetup, PhaseParams, run
from franson_gup.montecarlo._backend import BACKENDS


def default_setup() -> MCSetup:
    cascade = CascadeSpec(2.5, 1.5, 0.5, tau1=100.0, tau2=0.1, tau3=1000.0)
    ifc = InterferometerConfig(delta_t=10.0, window=1.0, phi2=math.pi / 3)
    return MCSetup(cascade, ifc, PhaseParams(2.0, 9.0, 1e-3), ModeCoefficients((1.0,), (0.5,)))


def time_backend(setup, backend, n_pairs, repeat, workers, seed):
    best, record = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        record = run(setup, n_pairs, seed, workers=workers, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, record


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args(argv)

    setup = default_setup()
    results = {}
    print(f"{'backend':<8} {'pairs':>10} {'best [s]':>10} {'pairs/s':>14}")
    for backend in BACKENDS:
        elapsed, record = time_backend(setup, backend, args.pairs, args.repeat, args.workers,
                                       args.seed)
        results[backend] = record
        print(f"{backend:<8} {args.pairs:>10d} {elapsed:>10.4f} {args.pairs / elapsed:>14.3e}")
    if "cython" not in BACKENDS:
        print("compiled kernel not built; only the python fallback was timed")
    elif results["cython"] != results["python"]:
        raise SystemExit("backends disagree")
    else:
        print("counts identical across backends")


if __name__ == "__main__":
    main()
