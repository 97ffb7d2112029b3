"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Every kernel runs on the same inputs under both backends; outputs are
compared before any timing is printed.
"""
import argparse
import time

import numpy as np

from coarse_lab import kernels
from coarse_lab.groups import FreeAbelian, FreeGroup
from coarse_lab.metric import build_cayley_graph


def _graph(space):
    b = space.backing
    return b.indptr.astype(np.int32), b.indices.astype(np.int32)


def _cases():
    f2 = build_cayley_graph(FreeGroup(2), 7)
    z2 = build_cayley_graph(FreeAbelian(2), 30)
    rng = np.random.default_rng(0)
    cases = []
    for name, sp in (("F2 radius 7", f2), ("Z2 box 30", z2)):
        indptr, indices = _graph(sp)
        src = np.arange(0, sp.n, max(1, sp.n // 64), dtype=np.int64)
        us = rng.integers(0, sp.n, 2000).astype(np.int64)
        vs = rng.integers(0, sp.n, 2000).astype(np.int64)
        cases.append((f"bfs_rows {name} x{len(src)}", "bfs_rows", (indptr, indices, src)))
        cases.append((f"bfs_bounded {name} hops 3", "bfs_bounded", (indptr, indices, src, 3)))
        cases.append((f"pair_hops {name} x2000", "pair_hops", (indptr, indices, us, vs)))
        cases.append((f"ball_pairs {name} r 2", "ball_pairs", (indptr, indices, np.arange(sp.n, dtype=np.int64), 2)))
    n = 200
    w = rng.integers(1, 50, (n, n)).astype(np.int64)
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0)
    cases.append((f"floyd_warshall {n}x{n}", "floyd_warshall", (w,)))
    return cases


def _call(mod, fn, args):
    if fn == "floyd_warshall":
        return mod.floyd_warshall(args[0].copy(), kernels.INF)
    return getattr(mod, fn)(*args)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled kernels are not built; run `python3 setup.py build_ext --inplace`")
    names = sorted(impls)
    print(f"{'case':42s}" + "".join(f"{n:>12s}" for n in names) + ("   speedup" if len(names) == 2 else ""))
    for label, fn, fargs in _cases():
        outs, times = {}, {}
        for name in names:
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                outs[name] = _call(impls[name], fn, fargs)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        if len(names) == 2 and not _same(outs["cython"], outs["python"]):
            raise SystemExit(f"backends disagree on {label}")
        row = f"{label:42s}" + "".join(f"{times[n] * 1e3:10.1f}ms" for n in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
