"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--qubits 16 20] [--repeat 5]

Prints per-kernel best-of-``repeat`` timings and the speedup, then one
end-to-end gradient estimate on the 19-qubit descent configuration.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from quantgrad import kernels
from quantgrad.gradest import estimate_gradient
from quantgrad.oracle import get_objective
from quantgrad.presets import PRESETS


def best_of(fn, repeat: int) -> float:
    fn()  # warm-up (JIT compile or cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(q: int, rng: np.random.Generator):
    amps = (rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)).astype(complex)
    amps /= np.linalg.norm(amps)
    turns = rng.uniform(0, 1, 1 << q)
    h = 1 / np.sqrt(2)
    return {
        "apply_1q (H)": lambda b: b.apply_1q(amps, q // 2, h, h, h, -h),
        "apply_mcx (Toffoli)": lambda b: b.apply_mcx(amps, 0b11, q - 1),
        "apply_mcphase": lambda b: b.apply_mcphase(amps, 0b101, np.exp(0.3j)),
        "apply_swap": lambda b: b.apply_swap(amps, 0, q - 1),
        "apply_phases": lambda b: b.apply_phases(amps, turns),
    }


def end_to_end(repeat: int) -> float:
    p = PRESETS["descent-a"]
    f = get_objective(p.objective)
    cfg = p.oracle_cfg(f.arity)
    return best_of(lambda: estimate_gradient(f, [0.75, 1.5], cfg, seed=1, offset=[0.01, 0.02]), repeat)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[16, 20])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.numba_backend is None:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':24s} {'qubits':>6s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for q in args.qubits:
        for name, call in kernel_cases(q, rng).items():
            t_np = best_of(lambda: call(kernels.numpy_backend), args.repeat)
            t_nb = best_of(lambda: call(kernels.numba_backend), args.repeat)
            print(f"{name:24s} {q:6d} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} {t_np / t_nb:8.1f}x")
    prev = kernels.use("numpy")
    try:
        t_np = end_to_end(args.repeat)
        kernels.use("numba")
        t_nb = end_to_end(args.repeat)
    finally:
        kernels.use(prev)
    print(f"{'gradient estimate':24s} {19:6d} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} {t_np / t_nb:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
