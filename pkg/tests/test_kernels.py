"""The compiled kernels must agree with the pure-Python reference."""
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from forestalg import _pykernels

try:
    from forestalg import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

pytestmark = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def _maps(rng, n, k):
    return [tuple(rng.randrange(n) for _ in range(n)) for _ in range(k)]


def _add_table(rng, n):
    # commutative saturating-style table so that pointwise sums stay in range
    return [[min(n - 1, x + y) for y in range(n)] for x in range(n)]


@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 10**6))
def test_monoid_closure(n, k, seed):
    rng = random.Random(seed)
    gens = _maps(rng, n, k)
    assert _kernels.monoid_closure(gens, 5000) == _pykernels.monoid_closure(gens, 5000)


@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 10**6),
       st.booleans(), st.booleans(), st.booleans())
def test_closure(n, k, seed, compose, pointwise, multiples):
    rng = random.Random(seed)
    gens = _maps(rng, n, k)
    add = _add_table(rng, n)
    got = _kernels.closure(gens, add, compose, pointwise, multiples, 5000)
    want = _pykernels.closure(gens, add, compose, pointwise, multiples, 5000)
    assert [tuple(x) for x in got[0]] == [tuple(x) for x in want[0]]
    assert [tuple(x) for x in got[1]] == [tuple(x) for x in want[1]]


def test_closure_limit():
    gens = [(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)]          # generates S5
    with pytest.raises(_pykernels.ClosureLimitExceeded):
        _kernels.monoid_closure(gens, 50)
    with pytest.raises(_pykernels.ClosureLimitExceeded):
        _pykernels.monoid_closure(gens, 50)
    assert len(_kernels.monoid_closure(gens, 200)[0]) == 120


@given(st.integers(1, 40), st.integers(0, 10**6))
def test_eval_flat(n_nodes, seed):
    import numpy as np
    rng = random.Random(seed)
    n_h, n_v = 3, 4
    act = [[rng.randrange(n_h) for _ in range(n_h)] for _ in range(n_v)]
    add = [[min(2, x + y) for y in range(n_h)] for x in range(n_h)]
    parent = [-1] + [rng.randrange(i) if rng.random() < 0.8 else -1 for i in range(1, n_nodes)]
    # preorder requires every parent to precede its children, which holds by construction
    img = [rng.randrange(n_v) for _ in range(n_nodes)]
    want = _pykernels.eval_flat(img, parent, act, add, 0)
    got = _kernels.eval_flat(np.asarray(img, dtype=np.int32), np.asarray(parent, dtype=np.int32),
                             np.asarray(act, dtype=np.int32), np.asarray(add, dtype=np.int32), 0)
    assert list(got[0]) == list(want[0]) and got[1] == want[1]
