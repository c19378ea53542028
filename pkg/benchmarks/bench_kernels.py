"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--N 4096]
"""

import argparse
import timeit

import numpy as np

from mulspace import kernels


def cases(n):
    rng = np.random.default_rng(0)
    x = np.linspace(-np.pi, np.pi, n, endpoint=False)
    u = rng.uniform(-0.2, 1.2, n * 16)
    dxi = 0.05
    xi0 = -dxi * (n // 2)
    a = rng.random(n)
    ks = np.arange(-int(n * dxi / 2) + 1, int(n * dxi / 2))
    m = 128
    a2 = rng.random((m, m))
    k1, k2 = (g.ravel() for g in np.meshgrid(np.arange(-2, 3), np.arange(-2, 3), indexing="ij"))
    kern = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    kern2 = rng.standard_normal((m, m)) + 0j
    x2 = np.linspace(-np.pi, np.pi, m, endpoint=False)
    return {
        "smooth_step": (u,),
        "bump_profile": (u, 1.0),
        "lattice_power_sums_1d": (a, xi0, dxi, ks, 1.0, 1.5),
        "lattice_power_sums_2d": (a2, -dxi * (m // 2), dxi, k1, k2, 1.0, 1.5),
        "masked_shift_l1_1d": (kern, x, 7, 0.5),
        "masked_shift_l1_2d": (kern2, x2, 3, -2, 0.5),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--N", type=int, default=4096)
    args = ap.parse_args()
    impls = kernels.implementations()
    if "compiled" not in impls:
        print("compiled extension not built; timing the python backend only")
    print(f"{'kernel':<24}" + "".join(f"{name:>14}" for name in impls) + f"{'speedup':>10}")
    for name, call_args in cases(args.N).items():
        times = {}
        for label, mod in impls.items():
            fn = getattr(mod, name)
            number = 20
            times[label] = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat)) / number
        row = f"{name:<24}" + "".join(f"{times[k] * 1e3:>12.3f}ms" for k in impls)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
