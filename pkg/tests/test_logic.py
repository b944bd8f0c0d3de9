import itertools
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import forests
from forestalg.algebra import accepts, enumerate_values
from forestalg.corpus import get_example
from forestalg.logic import (FALSE, TRUE, And, Exists, FormulaSyntaxError, Label, Not, Or,
                             Partition, RegexSyntaxError, compile_to_recognizer,
                             compose_languages, ctl_eu, dfa_is_aperiodic, ef, exists, forest_sat,
                             format_formula, is_forest_formula, minimize_dfa, parse_formula,
                             regex_to_dfa, tree_sat, unambiguous_family)
from forestalg.terms import Alphabet, UnknownSymbolError, parse_forest
from oracles import naive_forest_sat, naive_tree_sat, subtrees

AB = Alphabet(("a", "b"))

# ------------------------------------------------------------------ regexes


def regexes(n):
    letter = st.integers(1, n).map(str)
    return st.recursive(
        letter,
        lambda r: st.one_of(
            st.tuples(r, r).map(lambda p: p[0] + p[1]),
            st.tuples(r, r).map(lambda p: f"({p[0]}|{p[1]})"),
            r.map(lambda x: f"({x})*"),
            r.map(lambda x: f"({x})+"),
        ),
        max_leaves=6)


@given(regexes(3), st.lists(st.lists(st.integers(1, 3), max_size=7), min_size=20, max_size=20))
def test_dfa_matches_python_re(regex, words):
    dfa = regex_to_dfa(regex, 3)
    pattern = re.compile(regex)
    for w in words:
        assert dfa.accepts(w) == bool(pattern.fullmatch("".join(map(str, w))))


@given(regexes(2))
def test_dfa_is_minimal(regex):
    dfa = regex_to_dfa(regex, 2)
    assert minimize_dfa(dfa).n_states == dfa.n_states
    # every pair of states is told apart by a short word
    words = [w for k in range(dfa.n_states + 1) for w in itertools.product((1, 2), repeat=k)]
    sigs = {tuple(dfa.run(w, q) in dfa.finals for w in words) for q in range(dfa.n_states)}
    assert len(sigs) == dfa.n_states


def test_multi_digit_letters():
    dfa = regex_to_dfa("<12>1*", 12)
    assert dfa.accepts([12, 1, 1]) and not dfa.accepts([1, 12])


@pytest.mark.parametrize("bad", ["(1", "1)", "a", "<x>"])
def test_regex_errors(bad):
    with pytest.raises(RegexSyntaxError):
        regex_to_dfa(bad, 2)


@pytest.mark.parametrize("regex,aperiodic", [
    ("(11)*", False), ("1*", True), ("(31)*32", True), ("(12)*", True), ("1(111)*", False)])
def test_aperiodicity(regex, aperiodic):
    assert dfa_is_aperiodic(regex_to_dfa(regex, 3)) == aperiodic


# ----------------------------------------------------------------- formulas


def tree_formulas(depth=2):
    base = st.sampled_from([Label("a"), Label("b")])
    if depth == 0:
        return base
    sub = tree_formulas(depth - 1)
    return st.one_of(
        base,
        sub.map(Not),
        st.tuples(sub, sub).map(lambda p: And(p)),
        st.tuples(sub, sub).map(lambda p: Or(p)),
        forest_formulas(depth - 1),
    )


def forest_formulas(depth=2):
    if depth == 0:
        return st.sampled_from([TRUE, FALSE])
    sub = tree_formulas(depth - 1)
    fsub = forest_formulas(depth - 1)
    regex = st.sampled_from(["1+", "2*1", "(12)*1", "1*2", "(1|2)2"])
    return st.one_of(
        sub.map(ef),
        st.tuples(sub, sub).map(lambda p: ctl_eu(*p)),
        st.tuples(st.integers(1, 3), sub, regex).map(lambda p: exists(p[0], [p[1]], p[2])),
        fsub.map(Not),
        st.tuples(fsub, fsub).map(lambda p: And(p)),
    )


@given(forest_formulas(), forests(max_leaves=8))
def test_forest_sat_matches_naive(phi, f):
    assert forest_sat(f, phi) == naive_forest_sat(f, phi)


@given(tree_formulas(), forests(max_leaves=8))
def test_tree_sat_matches_naive(phi, f):
    for t in f:
        assert tree_sat(t, phi) == naive_tree_sat(t, phi)


@given(tree_formulas(), forests(max_leaves=8))
def test_ef_is_some_subtree(psi, f):
    assert forest_sat(f, ef(psi)) == any(naive_tree_sat(t, psi) for t in subtrees(f))


def _eu_direct(f, psi, phi):
    for t in f:
        if naive_tree_sat(t, phi):
            return True
        if naive_tree_sat(t, psi) and _eu_direct(t.children, psi, phi):
            return True
    return False


@given(tree_formulas(1), tree_formulas(1), forests(max_leaves=8))
def test_eu_semantics(psi, phi, f):
    assert forest_sat(f, ctl_eu(psi, phi)) == _eu_direct(f, psi, phi)


def test_graded_example():
    phi = parse_formula("E[3]{a}/1+/")
    assert forest_sat(parse_forest("a(a)+a"), phi)
    assert not forest_sat(parse_forest("a+a"), phi)
    assert not forest_sat(parse_forest("a(b)+a"), phi)


def test_tree_vs_forest_satisfaction():
    # forest satisfaction of EF is non-strict, tree satisfaction strict
    t = parse_forest("a")[0]
    assert forest_sat((t,), ef(Label("a")))
    assert not tree_sat(t, ef(Label("a")))


def test_unambiguous_family():
    a, b = Label("a"), Label("b")
    fam = unambiguous_family([a, b])
    assert fam == [a, And((b, Not(a))), And((Not(a), Not(b)))]
    assert unambiguous_family([]) == [TRUE]


@given(forest_formulas())
def test_format_round_trip(phi):
    text = format_formula(phi)
    assert parse_formula(text) == phi
    assert format_formula(parse_formula(text)) == text


@pytest.mark.parametrize("text", ["EF", "a &", "E[2]{a}", "E{a}/1", "(a", "a b", "EU(a)"])
def test_formula_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_formula_alphabet_check():
    with pytest.raises(UnknownSymbolError):
        parse_formula("EF c", AB)


def test_bare_label_is_not_a_forest_formula():
    assert not is_forest_formula(Label("a"))
    with pytest.raises(ValueError):
        compile_to_recognizer(Label("a"), AB)
    with pytest.raises(ValueError):
        forest_sat(parse_forest("a"), Label("a"))


def test_compile_rejects_unknown_labels():
    with pytest.raises(UnknownSymbolError):
        compile_to_recognizer(ef(Label("c")), AB)


@given(forest_formulas())
def test_compiled_recognizer_agrees(phi):
    r = compile_to_recognizer(phi, AB)
    for f, h in enumerate_values(r.hom, 4):
        assert (h in r.accepting) == naive_forest_sat(f, phi)


def test_compose_languages():
    # blocks: does the subforest below contain an a?
    inner = get_example("some-node-a").recognizer
    parts = Partition(inner.hom, ("no", "yes"))
    pairs = AB.product(parts.blocks)
    outer = compile_to_recognizer(ef(Label(("b", "yes"))), pairs)
    L = compose_languages(outer, parts)

    def direct(f):
        return any(t.label == "b" and any(s.label == "a" for s in subtrees(t.children))
                   for t in subtrees(f))

    for f, h in enumerate_values(L.hom, 5):
        assert (h in L.accepting) == direct(f)


def test_exists_requires_positive_k():
    with pytest.raises(ValueError):
        exists(0, [Label("a")], "1")
    assert isinstance(exists(2, [], "1+"), Exists)
