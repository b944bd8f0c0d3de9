"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--nodes N]

Each kernel runs on the same input under both backends; results are
checked for equality before timings are reported.
"""
import argparse
import random
import timeit

import numpy as np

from forestalg import _pykernels
from forestalg.algebra import syntactic_algebra
from forestalg.corpus import get_example

try:
    from forestalg import _kernels
except ImportError:
    _kernels = None


def cases(nodes: int, seed: int):
    rng = random.Random(seed)
    s6 = [(1, 2, 3, 4, 5, 0), (1, 0, 2, 3, 4, 5)]
    yield "monoid_closure S6", lambda k: k.monoid_closure(s6, 5000)

    A = syntactic_algebra(get_example("L2").recognizer).algebra
    rows = [tuple(r) for r in A.act]
    add = [list(r) for r in A.h_add]
    yield "closure compose+add (L2)", lambda k: k.closure(rows, add, True, True, False, 20000)
    yield "closure compose+multiples (L2)", lambda k: k.closure(rows, add, True, False, True, 20000)

    parent = [-1] + [rng.randrange(i) if rng.random() < 0.9 else -1 for i in range(1, nodes)]
    img = [rng.randrange(A.n_v) for _ in range(nodes)]
    arrays = [np.asarray(x, dtype=np.int32) for x in (img, parent, A.act, A.h_add)]
    lists = (img, parent, [list(r) for r in A.act], add)
    yield f"eval_flat {nodes} nodes", lambda k: k.eval_flat(
        *(arrays if k is _kernels else lists), A.zero)


def normalize(result):
    if isinstance(result, tuple) and len(result) == 2 and isinstance(result[1], (int, np.integer)):
        return [int(x) for x in result[0]], int(result[1])
    images, parents = result
    return [tuple(x) for x in images], [tuple(x) for x in parents]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels are not built; only the pure backend is available")
    print(f"{'kernel':34} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for name, run in cases(args.nodes, args.seed):
        pure = min(timeit.repeat(lambda: run(_pykernels), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:34} {pure * 1e3:12.2f} {'-':>12} {'-':>8}")
            continue
        assert normalize(run(_kernels)) == normalize(run(_pykernels)), name
        fast = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
        print(f"{name:34} {pure * 1e3:12.2f} {fast * 1e3:12.2f} {pure / fast:7.1f}x")


if __name__ == "__main__":
    main()
