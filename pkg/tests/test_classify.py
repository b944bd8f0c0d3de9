import pytest

from forestalg.algebra import (Homomorphism, SizeGuardExceeded, generate_algebra,
                               syntactic_algebra, trivial, u1, u2)
from forestalg.classify import (EXCLUDED, OPEN, amplify, check_distributive, check_ef,
                                check_path, classification_report, has_horizontal_confusion,
                                horizontal_confusion, multicontext_values,
                                uniform_vertical_confusion, vertical_confusion,
                                vertical_witnesses, vhat, vtilde)
from forestalg.corpus import corpus_algebras, get_example
from forestalg.monoid import cyclic_group, evaluate_provenance
from forestalg.terms import Alphabet, hole_count, parse_forest
from oracles import catalogue, uniform_maps, vertical_maps

CATALOGUE = [generate_algebra(add, 0, V)[0] for add, V in catalogue(3, 6)]


def syn(name):
    return syntactic_algebra(get_example(name).recognizer).algebra


def test_base_checks():
    assert check_ef(u1()) and check_ef(trivial())
    bad = check_ef(u2())
    assert not bad and bad.counterexample.law == "vh+h=vh"
    assert check_distributive(u1()) and check_distributive(u2())
    assert check_path(u1()) and check_path(u2())


def test_group_horizontal_monoid_is_not_path():
    A, _ = generate_algebra(cyclic_group(2).table, 0, [])
    assert not check_path(A)
    assert not check_ef(A)


@pytest.mark.parametrize("A", CATALOGUE, ids=lambda A: f"H{A.n_h}V{A.n_v}")
def test_counterexamples_break_the_identity(A):
    res = check_ef(A)
    if not res:
        law, w = res.counterexample.law, res.counterexample.witness
        if law == "vh+h=vh":
            v, h = w
            assert A.h_add[A.act[v][h]][h] != A.act[v][h]
    res = check_distributive(A)
    if not res and res.counterexample.law.startswith("v(g+h)"):
        v, g, h = res.counterexample.witness
        assert A.act[v][A.h_add[g][h]] != A.h_add[A.act[v][g]][A.act[v][h]]


@pytest.mark.parametrize("A", CATALOGUE, ids=lambda A: f"H{A.n_h}V{A.n_v}")
def test_closures_are_the_multicontext_maps(A):
    assert {t.image for t in vhat(A)} == set(vertical_maps(A, 7))
    assert {t.image for t in vtilde(A)} == set(uniform_maps(A, 8))


def test_provenance_replays():
    A = syn("L2")
    gens = {f"v{i}": A.act[i] for i in range(A.n_v)}
    for t in vhat(A)[:200]:
        assert evaluate_provenance(t.provenance, gens, A.h_add) == t.image


def test_vertical_witnesses_replay():
    for name in ("L1", "L2"):
        A = syn(name)
        w = vertical_confusion(A)
        assert w is not None and w.replay(A)
        hom = w.hom(A)
        k = hole_count(w.multicontext)
        for i, g in enumerate(w.cycle):
            assert multicontext_values(hom, w.multicontext, [{g}] * k) == {w.cycle[(i + 1) % len(w.cycle)]}


def test_uniform_witness_is_uniform():
    A = syn("L2")
    w = uniform_vertical_confusion(A)
    assert w is not None and w.kind == "uniform-vertical" and w.replay(A)
    # an arbitrary vertical witness is not accepted as uniform unless it is
    for v in vertical_witnesses(A):
        if hole_count(v.multicontext) > 1 and len({t.label for t in v.multicontext}) > 1:
            from dataclasses import replace
            assert not replace(v, kind="uniform-vertical").replay(A)
            break


def test_ef_algebras_have_no_confusion():
    for name, A in corpus_algebras().items():
        if check_ef(A):
            assert vertical_confusion(A) is None, name
            assert horizontal_confusion(A) is None, name


def test_l1_report():
    report = classification_report(syn("L1"))
    assert report.vertical is not None and report.ctl == EXCLUDED


def test_horizontal_l3():
    r = get_example("L3").recognizer
    A = syntactic_algebra(r).algebra
    w = horizontal_confusion(A)
    assert w is not None and len(w.subset) == 2 and w.replay(A)
    # the witness stays a confusion after amplification
    hom = w.hom(A)
    assert has_horizontal_confusion(hom, amplify(w.multicontext, 2), w.subset)


def test_horizontal_direct_on_l3_formula_shape():
    r = get_example("L3").recognizer
    p = parse_forest("or(and(_+_)+and(_+_))")
    f, t = (r.hom.image(s) for s in ("f", "t"))
    G = {r.algebra.act[f][0], r.algebra.act[t][0]}
    assert has_horizontal_confusion(r.hom, p, G)
    assert has_horizontal_confusion(r.hom, amplify(p, 3), G)


def test_amplify_shape():
    p = parse_forest("a(_+_)")
    assert amplify(p, 2) == parse_forest("a(a(_+_)+a(_+_))")
    with pytest.raises(ValueError):
        amplify(parse_forest("a"), 2)


def test_no_confusion_for_zero_hole_context():
    hom = Homomorphism(Alphabet(("a",)), u1(), (1,))
    assert not has_horizontal_confusion(hom, parse_forest("a"), {0, 1})


def test_horizontal_cap():
    with pytest.raises(SizeGuardExceeded):
        horizontal_confusion(syn("L3"), max_h=3)


def test_report_u1():
    rep = classification_report(u1())
    assert rep.ef.holds and rep.ctl == OPEN and rep.fo == OPEN and rep.graded_pdl == OPEN
    assert "EF: yes" in rep.render()
    d = rep.as_dict()
    assert d["ef"] is True and d["vertical_confusion"] is None


def test_report_l3():
    rep = classification_report(syn("L3"))
    assert rep.graded_pdl == EXCLUDED
    assert rep.aperiodic_v
    assert rep.pdl_note == "excluded with graded PDL"
    # no vertical confusion: L3 is excluded only by the horizontal kind
    assert rep.vertical is None and rep.ctl == OPEN


def test_report_u2():
    rep = classification_report(u2())
    assert not rep.ef.holds and rep.vertical is None and rep.ctl == OPEN
