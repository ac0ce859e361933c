"""Benchmark: compiled kernels vs the pure-Python fallback.

Times the two hot primitives (corrected-rate weights, roulette draws) and a
full simulated ideation run on each backend.  The full-run comparison forks
a subprocess with ECBW_PURE_PYTHON=1 so the import-time backend selection
is exercised for real.

Usage: python benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from ecbw._kernels import pykernels


def _load_backends():
    backends = {"python": pykernels}
    try:
        from ecbw._kernels import _ckernels

        backends["c"] = _ckernels
    except ImportError:
        pass
    return backends


def time_callable(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_weights(impl, n=200_000):
    rng = np.random.default_rng(1)
    pres = [int(p) for p in rng.integers(0, 10, size=30)]
    scores = [int(rng.integers(0, p + 1)) if p else 0 for p in pres]
    mask = [False] * 30

    def work():
        for _ in range(n // 30):
            impl.isr_weights(pres, scores, mask, 3.0, 1.5, 2.0)

    return time_callable(work)


def bench_roulette(impl, n=200_000):
    rng = np.random.default_rng(2)
    weights = [float(w) for w in rng.random(30)]
    uniform_sets = [[float(u) for u in rng.random(3)] for _ in range(512)]

    def work():
        for i in range(n):
            impl.roulette_draws(weights, 3, uniform_sets[i % 512])

    return time_callable(work)


def bench_full_run(pure: bool, seeds=(0, 1, 2)):
    env = dict(os.environ)
    if pure:
        env["ECBW_PURE_PYTHON"] = "1"
    else:
        env.pop("ECBW_PURE_PYTHON", None)
    script = (
        "import time, hashlib\n"
        "from ecbw._kernels import BACKEND\n"
        "from ecbw.simulate import RunConfig, run\n"
        f"seeds = {list(seeds)}\n"
        "digests = []\n"
        "start = time.perf_counter()\n"
        "for s in seeds:\n"
        "    log = run(RunConfig(seed=s)).event_log_text()\n"
        "    digests.append(hashlib.sha256(log.encode()).hexdigest())\n"
        "elapsed = time.perf_counter() - start\n"
        "print(BACKEND, elapsed / len(seeds), *digests)\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", script], env=env, capture_output=True, text=True
    )
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    fields = out.stdout.split()
    return fields[0], float(fields[1]), fields[2:]


def main():
    backends = _load_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'benchmark':<28} " + " ".join(f"{name:>12}" for name in backends))
    rows = [("corrected-rate weights", bench_weights), ("roulette draws x3", bench_roulette)]
    for label, fn in rows:
        times = {name: fn(impl) for name, impl in backends.items()}
        cells = " ".join(f"{t * 1e3:>10.1f}ms" for t in times.values())
        print(f"{label:<28} {cells}")
        if "c" in times:
            print(f"{'':<28} speedup x{times['python'] / times['c']:.1f}")

    print("\nfull simulated run (subprocess, 3 seeds):")
    pure_name, pure_time, pure_digests = bench_full_run(pure=True)
    print(f"  {pure_name:>8}: {pure_time * 1e3:.0f}ms per run")
    compiled_name, compiled_time, compiled_digests = bench_full_run(pure=False)
    print(f"  {compiled_name:>8}: {compiled_time * 1e3:.0f}ms per run")
    if compiled_name != pure_name:
        match = "identical" if compiled_digests == pure_digests else "DIFFERENT"
        print(f"  event logs across backends: {match}")
        print(f"  speedup x{pure_time / compiled_time:.2f}")


if __name__ == "__main__":
    main()
