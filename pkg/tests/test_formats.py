import pytest
from hypothesis import given, strategies as st

from forestalg.algebra import eval_forest, is_isomorphic, u1, u2
from forestalg.corpus import EXAMPLES, corpus_algebras, get_example
from forestalg.formats import (HEADER, AlgebraDocument, FormatError, format_algebra,
                               parse_algebra, read_algebra, write_algebra)

from conftest import forests

U1_TEXT = """\
forestalg-format 1
# the two-element algebra
algebra
H 2
zero 0
add
0 1
1 1
V 2
one 0
act
0 1
1 1
ins-pre 0 1
ins-post 0 1
letters a=1 b=0
accepting 1
end
"""


def _same(A, B):
    return (A.h_add == B.h_add and A.act == B.act and A.v_mul == B.v_mul and A.zero == B.zero
            and A.one == B.one and list(A.ins_pre) == list(B.ins_pre)
            and list(A.ins_post) == list(B.ins_post))


@pytest.mark.parametrize("name", sorted(corpus_algebras()))
def test_round_trip_algebras(name):
    A = corpus_algebras()[name]
    doc = parse_algebra(format_algebra(A))
    assert _same(doc.algebra, A)
    assert doc.letters is None and doc.accepting is None


@pytest.mark.parametrize("name", EXAMPLES)
def test_round_trip_bundles(name, tmp_path):
    r = get_example(name).recognizer
    path = tmp_path / f"{name}.alg"
    write_algebra(str(path), AlgebraDocument.of(r))
    doc = read_algebra(str(path))
    assert _same(doc.algebra, r.algebra)
    r2 = doc.recognizer()
    assert list(r2.alphabet) == list(r.alphabet) and r2.accepting == r.accepting


def test_hand_written_file():
    doc = parse_algebra(U1_TEXT)
    assert is_isomorphic(doc.algebra, u1())
    assert doc.letters == {"a": 1, "b": 0}
    # derived mul matches composition
    assert [list(r) for r in doc.algebra.v_mul] == [[0, 1], [1, 1]]


@given(forests(("a", "b")))
def test_parsed_recognizer_evaluates(f):
    from forestalg.terms import labels
    r = parse_algebra(U1_TEXT).recognizer()
    assert (eval_forest(r.hom, f) == 1) == ("a" in labels(f))


def test_missing_sections_reported_on_use():
    doc = AlgebraDocument(u2())
    assert "letters" not in format_algebra(doc)
    with pytest.raises(FormatError):
        parse_algebra(format_algebra(doc)).hom()
    hom_only = parse_algebra(U1_TEXT.replace("accepting 1\n", ""))
    hom_only.hom()
    with pytest.raises(FormatError):
        hom_only.recognizer()


@pytest.mark.parametrize("mutate,line", [
    (lambda t: t.replace(HEADER, "forestalg-format 9"), 1),
    (lambda t: t.replace("H 2", "H two"), 4),
    (lambda t: t.replace("add\n0 1\n", "add\n0 1 1\n"), 7),
    (lambda t: t.replace("one 0", "unit 0"), 10),
    (lambda t: t.replace("letters a=1 b=0", "letters a1 b=0"), 16),
    (lambda t: t.replace("end\n", "end\nextra\n"), 19),
])
def test_errors_carry_line_numbers(mutate, line):
    with pytest.raises(FormatError) as info:
        parse_algebra(mutate(U1_TEXT))
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("zero 0", "zero 5"),
    lambda t: t.replace("letters a=1", "letters a=7"),
    lambda t: t.replace("accepting 1", "accepting 3"),
    lambda t: t.replace("end\n", ""),
    lambda t: "",
    # not associative / not an action
    lambda t: t.replace("add\n0 1\n1 1", "add\n0 1\n1 0").replace("act\n0 1\n1 1", "act\n0 1\n0 0"),
])
def test_rejects_invalid(mutate):
    with pytest.raises(FormatError):
        parse_algebra(mutate(U1_TEXT))
