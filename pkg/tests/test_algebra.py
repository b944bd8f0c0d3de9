import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import forests
from forestalg.algebra import (ForestAlgebra, Homomorphism, Recognizer, SizeGuardExceeded,
                               accepts, enumerate_values, eval_context, eval_forest,
                               eval_multicontext, find_isomorphism, generate_algebra,
                               is_isomorphic, reachable_subalgebra, syntactic_algebra, trivial, u1,
                               u2, validate_algebra)
from forestalg.corpus import get_example
from forestalg.products import direct_product
from forestalg.terms import (HOLE, Alphabet, Tree, apply_context, enumerate_forests,
                             fill_multicontext, hole_count, parse_forest)

AB = Alphabet(("a", "b"))


def naive_eval(hom, f):
    A = hom.algebra
    out = A.zero
    for t in f:
        out = A.h_add[out][A.act[hom.image(t.label)][naive_eval(hom, t.children)]]
    return out


def l1_hom():
    return get_example("L1").recognizer.hom


def test_base_algebras_valid():
    for A in (trivial(), u1(), u2()):
        assert validate_algebra(A) is None
    assert u1().H.is_idempotent() and u2().n_v == 3


def test_validation_catches_broken_tables():
    # action that does not respect composition
    A = ForestAlgebra([[0, 1], [1, 1]], 0, [[0, 1], [1, 1]], 0, [[0, 1], [1, 0]], [0, 1], [0, 1])
    assert validate_algebra(A) is not None
    # insertion element with the wrong action
    B = ForestAlgebra([[0, 1], [1, 1]], 0, [[0, 1], [1, 1]], 0, [[0, 1], [1, 1]], [0, 0], [0, 1])
    assert validate_algebra(B).law.startswith("insertion")


def test_size_guard():
    perm = [(1, 2, 3, 4, 5, 0), (1, 0, 2, 3, 4, 5)]
    with pytest.raises(SizeGuardExceeded):
        generate_algebra([[min(5, x + y) for y in range(6)] for x in range(6)], 0, perm, limit=30)


@given(forests())
def test_eval_matches_naive(f):
    hom = l1_hom()
    assert eval_forest(hom, f) == naive_eval(hom, f)


@given(forests(), forests())
def test_eval_is_additive(s, t):
    hom = l1_hom()
    A = hom.algebra
    assert eval_forest(hom, s + t) == A.h_add[eval_forest(hom, s)][eval_forest(hom, t)]


@given(forests(holes=True), forests())
def test_context_values(p, s):
    if hole_count(p) != 1:
        return
    hom = l1_hom()
    v = eval_context(hom, p)
    assert hom.algebra.act[v][eval_forest(hom, s)] == eval_forest(hom, apply_context(p, s))


@given(forests(holes=True), st.lists(forests(max_leaves=3), min_size=6, max_size=6))
def test_multicontext_values(p, fill):
    hom = l1_hom()
    k = hole_count(p)
    if k > 6:
        return
    values = [eval_forest(hom, f) for f in fill[:k]]
    assert eval_multicontext(hom, p, values) == eval_forest(hom, fill_multicontext(p, fill[:k]))


def test_enumerate_values_order():
    hom = l1_hom()
    pairs = list(enumerate_values(hom, 4))
    assert [f for f, _ in pairs] == list(enumerate_forests(AB, 4))
    assert all(v == eval_forest(hom, f) for f, v in pairs)


def _contexts(alphabet, max_nodes):
    """One-hole contexts with at most ``max_nodes`` labelled nodes."""
    marker = "Zhole"

    def swap(f):
        return tuple(Tree(HOLE, ()) if t.label == marker else Tree(t.label, swap(t.children))
                     for t in f)

    def count(f):
        return sum((t.label == marker) + count(t.children) for t in f)

    def leaf_only(f):
        return all((t.label != marker or not t.children) and leaf_only(t.children) for t in f)

    for f in enumerate_forests(Alphabet(tuple(alphabet) + (marker,)), max_nodes + 1):
        if count(f) == 1 and leaf_only(f):
            yield swap(f)


def _distinguished(r, n_forest=4, n_context=3):
    """Brute-force Myhill-Nerode: classes of small forests under small contexts."""
    reps = {}
    for f, v in enumerate_values(r.hom, n_forest):
        reps.setdefault(v, f)
    ctxs = list(_contexts(r.alphabet, n_context))
    sigs = {v: tuple(accepts(r, apply_context(p, f)) for p in ctxs) for v, f in reps.items()}
    return len(reps), len(set(sigs.values()))


@pytest.mark.parametrize("name", ["some-node-a", "some-path-Bstar-b", "L1"])
def test_syntactic_is_minimal(name):
    r = get_example(name).recognizer
    s = syntactic_algebra(r)
    assert validate_algebra(s.algebra) is None
    for f, v in enumerate_values(r.hom, 5):
        assert (v in r.accepting) == accepts(s.recognizer, f)
    reached, classes = _distinguished(s.recognizer)
    assert reached == s.algebra.n_h == classes


def test_syntactic_collapses_redundant_product():
    P = direct_product(u1(), u1())
    c = P.v_index[(3, 3, 3, 3)]          # both coordinates constant ∞
    hom = Homomorphism(AB, P, (c, P.one))
    r = Recognizer(hom, {3})
    s = syntactic_algebra(r)
    assert is_isomorphic(s.algebra, u1())
    assert s.h_map[0] == 0 and s.h_map[3] == 1


def test_reachable_subalgebra():
    P = direct_product(u1(), u1())
    hom = Homomorphism(Alphabet(("a",)), P, (P.one,))
    r2, embed = reachable_subalgebra(Recognizer(hom, {0}))
    assert embed == [0] and r2.algebra.n_h == 1


def _relabel(A, seed):
    rng = random.Random(seed)
    hp = [0] + rng.sample(range(1, A.n_h), A.n_h - 1)
    inv = [hp.index(i) for i in range(A.n_h)]
    vp = list(range(A.n_v))
    rng.shuffle(vp)
    vinv = [vp.index(i) for i in range(A.n_v)]
    add = [[hp[A.h_add[inv[x]][inv[y]]] for y in range(A.n_h)] for x in range(A.n_h)]
    act = [[hp[A.act[vinv[v]][inv[x]]] for x in range(A.n_h)] for v in range(A.n_v)]
    return ForestAlgebra(add, 0, None, vp[A.one], act, [vp[A.ins_pre[inv[h]]] for h in range(A.n_h)],
                         [vp[A.ins_post[inv[h]]] for h in range(A.n_h)])


@pytest.mark.parametrize("seed", range(5))
def test_isomorphism_found_after_relabelling(seed):
    A = syntactic_algebra(get_example("L1").recognizer).algebra
    B = _relabel(A, seed)
    assert validate_algebra(B) is None
    iso = find_isomorphism(A, B)
    assert iso is not None
    h_perm, v_perm = iso
    for v, x in itertools.product(range(A.n_v), range(A.n_h)):
        assert h_perm[A.act[v][x]] == B.act[v_perm[v]][h_perm[x]]


def test_non_isomorphic():
    assert not is_isomorphic(u1(), u2())
    assert is_isomorphic(u1(), u1())


def test_accepts_checks_alphabet():
    r = get_example("some-node-a").recognizer
    assert accepts(r, parse_forest("b(a)"))
    assert not accepts(r, parse_forest("b(b)+b"))
    with pytest.raises(ValueError):
        accepts(r, (Tree("z", ()),))
