from math import comb

import pytest
from hypothesis import given

from conftest import forests
from forestalg.terms import (EMPTY, HOLE_TREE, Alphabet, ForestSyntaxError, Tree,
                             UnknownSymbolError, apply_context, canonicalize, compose_contexts,
                             enumerate_forests, fill_multicontext, format_forest, hole_count,
                             maximal_path_words, merge_same_root, node_count, parse_forest,
                             path_multiset, path_normal_form, substitute_all,
                             uniform_multicontext)

AB = Alphabet(("a", "b"))


def catalan(n):
    return comb(2 * n, n) // (n + 1)


def test_parse_examples():
    f = parse_forest("a(a)+a")
    assert f == (Tree("a", (Tree("a", ()),)), Tree("a", ()))
    assert parse_forest("0") == EMPTY
    assert parse_forest("") == EMPTY
    assert parse_forest("a(_+b)") == (Tree("a", (HOLE_TREE, Tree("b", ()))),)


@pytest.mark.parametrize("text", ["a(", "a)", "a++b", "(a)", "a(b))"])
def test_parse_errors(text):
    with pytest.raises(ForestSyntaxError):
        parse_forest(text)


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError):
        parse_forest("a(c)", AB)


@given(forests(holes=True))
def test_format_round_trip(f):
    assert parse_forest(format_forest(f)) == f


def test_enumeration_counts():
    # ordered forests with n nodes: Catalan(n) shapes, k^n labellings
    for n in range(0, 6):
        got = sum(1 for f in enumerate_forests(AB, n) if node_count(f) == n)
        assert got == catalan(n) * 2 ** n
    assert len(set(enumerate_forests(AB, 5))) == sum(catalan(n) * 2 ** n for n in range(6))


def test_unordered_enumeration_is_canonical():
    seen = [canonicalize(f) for f in enumerate_forests(AB, 4, unordered=True)]
    assert len(seen) == len(set(seen))
    assert {canonicalize(f) for f in enumerate_forests(AB, 4)} == set(seen)


def test_substitution():
    p = parse_forest("a(_)+b(_+_)")
    assert hole_count(p) == 3
    assert substitute_all(p, parse_forest("c")) == parse_forest("a(c)+b(c+c)")
    assert fill_multicontext(p, [parse_forest("x"), EMPTY, parse_forest("y+z")]) == \
        parse_forest("a(x)+b(y+z)")
    q = parse_forest("a(_)")
    assert compose_contexts(q, q) == parse_forest("a(a(_))")
    assert apply_context(q, parse_forest("b+b")) == parse_forest("a(b+b)")


def test_uniform_multicontext():
    u = uniform_multicontext([("a", 1), ("b", 2), ("c", 1)], roots=2)
    assert u == parse_forest("a(b(c(_)+c(_)))+a(b(c(_)+c(_)))")


def test_paths():
    f = parse_forest("a(b+b(a))+b")
    assert maximal_path_words(f) == {("a", "b"): 1, ("a", "b", "a"): 1, ("b",): 1}
    assert path_multiset(f)[("a", "b")] == 2


@given(forests())
def test_normal_form_keeps_paths(f):
    g = path_normal_form(f)
    assert path_multiset(g) == path_multiset(f)
    assert node_count(g) <= node_count(f)


@given(forests())
def test_canonicalize_keeps_paths(f):
    assert path_multiset(canonicalize(f)) == path_multiset(f)
    assert canonicalize(canonicalize(f)) == canonicalize(f)


def test_merge_same_root():
    f = parse_forest("a(b)+c+a(c)")
    assert merge_same_root(f, "a") == parse_forest("a(b+c)+c+a")
