import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import forests
from forestalg.algebra import (Homomorphism, SizeGuardExceeded, eval_forest, u1, u2,
                               validate_algebra)
from forestalg.corpus import counter_algebra, get_example
from forestalg.products import (Atom, Product, Wreath, WreathVertical, decode_wreath_vertical,
                                direct_product, full_wreath, parse_expression,
                                random_vertical, realize_expression, relabel,
                                sequential_compose, vertical_image, wreath_compose,
                                wreath_generated, wreath_identity, wreath_transformation)
from forestalg.terms import Alphabet, parse_forest

AB = Alphabet(("a", "b"))


def naive_eval(A, image, f):
    out = A.zero
    for t in f:
        out = A.h_add[out][A.act[image(t.label)][naive_eval(A, image, t.children)]]
    return out


def test_direct_product_projections():
    A1, A2 = u1(), u2()
    P = direct_product(A1, A2)
    assert validate_algebra(P) is None
    assert (P.n_h, P.n_v) == (4, 6)
    for x in range(P.n_h):
        for y in range(P.n_h):
            s = P.h_add[x][y]
            assert divmod(s, 2) == (A1.h_add[x // 2][y // 2], A2.h_add[x % 2][y % 2])


def test_full_wreath_u1_u1():
    W = full_wreath(u1(), u1())
    assert validate_algebra(W) is None
    assert (W.n_h, W.n_v) == (4, 8)


def test_full_wreath_guard():
    with pytest.raises(SizeGuardExceeded):
        full_wreath(u2(), full_wreath(u2(), u2()), limit=1000)


@given(st.integers(0, 10**6))
def test_generated_inside_full(seed):
    rng = random.Random(seed)
    A1, A2 = u1(), u2()
    gens = [WreathVertical(rng.randrange(A1.n_v), tuple(rng.randrange(A2.n_v) for _ in range(A1.n_h)))
            for _ in range(rng.randrange(3))]
    G, idx = wreath_generated(A1, A2, gens)
    F = full_wreath(A1, A2)
    assert validate_algebra(G) is None
    assert all(row in F.v_index for row in G.act)
    for g, i in zip(gens, idx):
        assert decode_wreath_vertical(A1, A2, G.act[i]) == g


def test_no_generators_gives_insertion_core():
    G, _ = wreath_generated(u1(), u1())
    assert validate_algebra(G) is None
    # identity plus the distinct insertions of H1 x H2
    ins = {G.act[G.ins_post[h]] for h in range(G.n_h)} | {G.act[G.one]}
    assert set(G.act) >= ins


@given(st.integers(0, 10**6))
def test_wreath_compose_is_composition(seed):
    rng = random.Random(seed)
    A1, A2 = counter_algebra(), u2()

    def rnd():
        return WreathVertical(rng.randrange(A1.n_v), tuple(rng.randrange(A2.n_v) for _ in range(A1.n_h)))

    w, w2 = rnd(), rnd()
    t, t2 = wreath_transformation(A1, A2, w), wreath_transformation(A1, A2, w2)
    composed = tuple(t[x] for x in t2)
    assert wreath_transformation(A1, A2, wreath_compose(A1, A2, w, w2)) == composed
    ident = wreath_identity(A1, A2)
    assert wreath_compose(A1, A2, ident, w) == w == wreath_compose(A1, A2, w, ident)


def test_wreath_is_associative():
    left = realize_expression(parse_expression("W(U1,U1,U1)"))
    right = full_wreath(u1(), full_wreath(u1(), u1()))
    assert set(left.act) == set(right.act)
    assert left.h_add == right.h_add


@pytest.mark.parametrize("text", ["U1", "P(U1,U2)", "W(U1,P(U1,U1))", "W(W(U1,U1),U1)", "P(W(U1,U1),T)"])
def test_expression_round_trip(text):
    e = parse_expression(text)
    assert str(e) == text
    assert parse_expression(str(e)) == e


@pytest.mark.parametrize("bad", ["", "P(", "W(U1,)", "U1 U1", "X"])
def test_expression_errors(bad):
    with pytest.raises(ValueError):
        e = parse_expression(bad)
        realize_expression(e)


@given(st.integers(0, 10**6))
def test_random_verticals_live_in_full_realization(seed):
    rng = random.Random(seed)
    e = Wreath((Product((Atom("U1"), Atom("U1"))), Atom("U1")))
    full = realize_expression(e)
    assert vertical_image(e, random_vertical(e, rng)) in full.v_index


@given(forests(max_leaves=8), st.integers(0, 10**6))
def test_sequential_composition(f, seed):
    rng = random.Random(seed)
    A1 = get_example("L1").recognizer.algebra
    A2 = u2()
    alpha = Homomorphism(AB, A1, tuple(rng.randrange(A1.n_v) for _ in AB))
    pairs = AB.product(range(A1.n_h))
    beta = Homomorphism(pairs, A2, tuple(rng.randrange(A2.n_v) for _ in pairs))
    seq = sequential_compose(alpha, beta)
    gamma = seq.materialize()
    want = (naive_eval(A1, alpha.image, f), naive_eval(A2, beta.image, relabel(alpha, f)))
    assert seq.split(eval_forest(gamma, f)) == want
    assert seq.evaluate(f) == want


def test_relabel():
    r = get_example("some-node-a").recognizer
    t = relabel(r.hom, parse_forest("b(a)+a"))
    assert [n.label for n in t] == [("b", 1), ("a", 0)]
    assert t[0].children[0].label == ("a", 0)


def test_sequential_compose_alphabet_check():
    alpha = Homomorphism(AB, u1(), (0, 1))
    with pytest.raises(ValueError):
        sequential_compose(alpha, Homomorphism(AB, u1(), (0, 1)))
