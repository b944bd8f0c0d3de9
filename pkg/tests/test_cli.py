import json

import pytest

from forestalg.algebra import eval_forest, is_isomorphic, u1
from forestalg.cli import main
from forestalg.formats import parse_algebra, read_algebra
from forestalg.logic import forest_sat, parse_formula
from forestalg.terms import parse_forest


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    assert main(["corpus", "--export", str(d)]) == 0
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_sat_examples(capsys):
    assert run(capsys, "sat", "E[3]{a}/1+/", "a(a)+a")[:2] == (0, "true\n")
    assert run(capsys, "sat", "E[3]{a}/1+/", "a(a)+b")[:2] == (0, "false\n")
    code, out, _ = run(capsys, "sat", "--json", "EF a", "b(a)")
    assert code == 0 and json.loads(out)["sat"] is True


def test_compile_round_trip(capsys, tmp_path):
    out_file = tmp_path / "ef.alg"
    code, out, _ = run(capsys, "compile", "EF a", "--alphabet", "a,b", "-o", out_file)
    assert code == 0 and "wrote" in out
    r = read_algebra(str(out_file)).recognizer()
    assert is_isomorphic(r.algebra, u1())
    code, out, _ = run(capsys, "compile", "EF a")
    doc = parse_algebra(out)
    assert list(doc.letters) == ["a"]


def test_eval(capsys, corpus_dir):
    alg = corpus_dir / "L1.alg"
    r = read_algebra(str(alg)).recognizer()
    for text in ["a(b)", "b(a)", "a(b)+b", "b"]:
        code, out, _ = run(capsys, "eval", alg, text)
        h = eval_forest(r.hom, parse_forest(text))
        assert code == 0 and r.algebra.h_name(h) in out
        assert ("accepted" in out) == (h in r.accepting)
    code, out, _ = run(capsys, "eval", "--json", alg, "a(_)")
    assert code == 0 and json.loads(out)["kind"] == "context"


def test_classify(capsys, corpus_dir):
    code, out, _ = run(capsys, "classify", corpus_dir / "some-node-a.alg")
    assert code == 0 and "EF: yes" in out
    code, out, _ = run(capsys, "classify", "--json", corpus_dir / "L1.alg")
    data = json.loads(out)
    assert code == 0 and data["ef"] is False


def test_syntactic(capsys, corpus_dir):
    code, out, _ = run(capsys, "syntactic", corpus_dir / "L2.alg")
    assert code == 0
    assert parse_algebra(out).algebra.n_h == 6


@pytest.mark.parametrize("name,kind,found", [
    ("some-node-a", "vertical", False),
    ("L1", "vertical", True),
    ("L2", "uniform", True),
    ("L1", "uniform", False),
    ("L3", "horizontal", True),
    ("L3", "vertical", False),
])
def test_confusion(capsys, corpus_dir, name, kind, found):
    code, out, _ = run(capsys, "confusion", "--json", corpus_dir / f"{name}.alg", "--kind", kind)
    assert code == 0
    assert json.loads(out)["confusion"] is found


def test_decompose(capsys, corpus_dir):
    code, out, _ = run(capsys, "decompose-ef", corpus_dir / "some-node-a.alg")
    assert code == 0 and "verified: yes" in out
    code, _, err = run(capsys, "decompose-ef", corpus_dir / "some-path-Bstar-b.alg")
    assert code == 1 and "not an EF algebra" in err


def test_wreath(capsys, corpus_dir, tmp_path):
    u = corpus_dir / "some-node-a.alg"
    code, out, _ = run(capsys, "wreath", "--json", u, u, "--full")
    data = json.loads(out)
    assert code == 0 and data["h_size"] == 4 and data["mode"] == "full"
    target = tmp_path / "w.alg"
    code, _, _ = run(capsys, "wreath", u, u, "-o", target)
    W = read_algebra(str(target)).algebra
    assert code == 0 and W.n_h == 4 and W.n_v <= data["v_size"]


def test_corpus(capsys, corpus_dir):
    code, out, _ = run(capsys, "corpus", "--suite")
    assert code == 0
    code, out, _ = run(capsys, "corpus", "--json")
    names = [r["name"] for r in json.loads(out)["examples"]]
    assert "L3" in names
    # exported formulas parse back and agree with the exported recognizers
    phi = parse_formula((corpus_dir / "L1.formula").read_text())
    r = read_algebra(str(corpus_dir / "L1.alg")).recognizer()
    from forestalg.algebra import accepts
    for text in ["a(b)", "a(b(a))", "b(a(b))+a(b(a(b)))"]:
        f = parse_forest(text)
        assert forest_sat(f, phi) == accepts(r, f)


@pytest.mark.parametrize("argv", [
    ["sat", "EF (", "a"],
    ["sat", "EF a", "a(("],
    ["eval", "/nonexistent.alg", "a"],
    ["bogus"],
    [],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_eval_unknown_symbol(capsys, corpus_dir):
    assert run(capsys, "eval", corpus_dir / "L1.alg", "z")[0] == 2


def test_bad_file(capsys, tmp_path):
    p = tmp_path / "bad.alg"
    p.write_text("forestalg-format 1\nalgebra\nH x\n")
    code, _, err = run(capsys, "classify", p)
    assert code == 2 and "line 3" in err


def test_size_guard(capsys, corpus_dir):
    code, _, err = run(capsys, "wreath", "--max-elements", "3", corpus_dir / "L1.alg",
                       corpus_dir / "L1.alg", "--full")
    assert code == 2 and "--max-elements" in err
