"""Example languages with semantic predicates, recognizers and expected verdicts.

``some-node-a``
    Forests over ``{a, b}`` with a node labeled ``a``.
``some-path-Bstar-b``
    Forests over ``{a, b, c}`` with a root-to-node path in ``a*b``.
``L1``
    Forests over ``{a, b}`` with a maximal (root-to-leaf) path in ``(ab)*``.
    The empty forest has no maximal path and is not a member.
``L2``
    Single binary trees over ``{a}`` (every node has 0 or 2 children) whose
    root-to-leaf paths all have an even number of edges.  The empty forest
    is not a tree and is not a member.
``L3``
    Single well-formed boolean expressions over ``{f, t, or, and}`` that
    evaluate to true.  ``f``/``t`` are the constants and must be leaves;
    ``or``/``and`` take one or more arguments.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

from .algebra import (ForestAlgebra, Homomorphism, Recognizer, enumerate_values, eval_forest,
                      eval_multicontext, generate_algebra, is_isomorphic, syntactic_algebra,
                      u1, u2)
from .classify import (amplify, check_distributive, check_ef, check_path, classification_report,
                       has_horizontal_confusion, horizontal_confusion, vertical_witnesses)
from .logic import Formula, Label, compile_to_recognizer, ctl_eu, ef, exists, parse_formula
from .monoid import is_aperiodic
from .terms import Alphabet, Forest, hole_count, parse_forest

__all__ = [
    "ExampleBundle", "EXAMPLES", "get_example", "corpus_formulas", "corpus_algebras",
    "path_algebras", "ef_algebras", "counter_algebra", "SuiteResult", "run_paper_suite",
    "l1_formula",
]


@dataclass(frozen=True)
class ExampleBundle:
    name: str
    alphabet: Alphabet
    predicate: Callable[[Forest], bool]
    recognizer: Recognizer
    formula: Formula | None = None
    facts: dict = field(default_factory=dict)
    oracle_bound: int = 7

    def agrees_up_to(self, max_nodes: int | None = None) -> Forest | None:
        """First forest where recognizer and predicate disagree, or ``None``."""
        acc = self.recognizer.accepting
        for f, h in enumerate_values(self.recognizer.hom, max_nodes or self.oracle_bound):
            if (h in acc) != self.predicate(f):
                return f
        return None


def _recognizer(alphabet: Alphabet, states: list, add, letter_maps: dict, accepting,
                h_names=None) -> Recognizer:
    """Recognizer from explicit state tables; ``letter_maps[a][x]`` is ``a`` applied to ``x``."""
    pos = {s: i for i, s in enumerate(states)}
    h_add = [[pos[add(x, y)] for y in states] for x in states]
    gens = [tuple(pos[letter_maps[a](x)] for x in states) for a in alphabet]
    alg, gen_index = generate_algebra(h_add, 0, gens,
                                      h_names=h_names or [str(s) for s in states])
    return Recognizer(Homomorphism(alphabet, alg, gen_index),
                      frozenset(pos[s] for s in states if s in accepting))


# ---------------------------------------------------------- some-node-a

def _some_node_a() -> ExampleBundle:
    A = Alphabet(("a", "b"))
    U = u1()
    rec = Recognizer(Homomorphism(A, U, {"a": 1, "b": 0}), frozenset({1}))

    def pred(f):
        return any(t.label == "a" or pred(t.children) for t in f)

    return ExampleBundle("some-node-a", A, pred, rec, ef(Label("a")),
                         {"ef": True, "syntactic": "U1"})


# ---------------------------------------------------------- some-path-Bstar-b

def _some_path() -> ExampleBundle:
    A = Alphabet(("a", "b", "c"))
    U = u2()
    # a passes through, b succeeds, c blocks
    rec = Recognizer(Homomorphism(A, U, {"a": 0, "b": 2, "c": 1}), frozenset({1}))

    def pred(f):
        return any(t.label == "b" or (t.label == "a" and pred(t.children)) for t in f)

    return ExampleBundle("some-path-Bstar-b", A, pred, rec, ctl_eu(Label("a"), Label("b")),
                         {"ef": False, "syntactic": "U2"})


# ---------------------------------------------------------- L1

def l1_formula() -> Formula:
    """``E((φ3 φ1)*(φ3 φ2))`` with ``φ = E(A+)``, ``φ1 = b ∧ φ``, ``φ2 = b ∧ ¬φ1``."""
    nonempty = exists(1, [], "1+")
    return exists(1, [Label("b") & nonempty, Label("b")], "(31)*32")


def _l1() -> ExampleBundle:
    A = Alphabet(("a", "b"))
    # (nonempty, X, Y): X = a maximal path in (ab)+, Y = a maximal path in b(ab)*
    states = [(False, False, False)] + [(True, x, y) for x in (False, True) for y in (False, True)]

    def add(p, q):
        return (p[0] or q[0], p[1] or q[1], p[2] or q[2])

    def letter_a(p):
        return (True, p[0] and p[2], False)

    def letter_b(p):
        return (True, False, (not p[0]) or p[1])

    names = ["0", "ne", "ne+Y", "ne+X", "ne+XY"]
    rec = _recognizer(A, states, add, {"a": letter_a, "b": letter_b},
                      {s for s in states if s[1]}, names)

    def words(f, prefix=""):
        for t in f:
            w = prefix + t.label
            if t.children:
                yield from words(t.children, w)
            else:
                yield w

    def pred(f):
        return any(len(w) % 2 == 0 and w == "ab" * (len(w) // 2) for w in words(f))

    return ExampleBundle("L1", A, pred, rec, l1_formula(),
                         {"ef": False, "ctl": "excluded", "graded_pdl": "necessary conditions pass",
                          "witness": "a(_)+b(_)", "h0": "b", "h1": "a(b)"})


# ---------------------------------------------------------- L2

def _l2() -> ExampleBundle:
    A = Alphabet(("a",))
    # 0, single even tree, single odd tree, single bad tree, even+even, odd+odd, anything else
    states = ["0", "E", "O", "B", "EE", "OO", "X"]

    def add(p, q):
        if p == "0":
            return q
        if q == "0":
            return p
        if p in ("E", "O") and p == q:
            return p + p
        return "X"

    def letter_a(p):
        return {"0": "E", "EE": "O", "OO": "E"}.get(p, "B")

    rec = _recognizer(A, states, add, {"a": letter_a}, {"E"})

    def depths(t, d=0):
        if not t.children:
            yield d
        for c in t.children:
            yield from depths(c, d + 1)

    def binary(t):
        return len(t.children) in (0, 2) and all(binary(c) for c in t.children)

    def pred(f):
        return len(f) == 1 and binary(f[0]) and all(d % 2 == 0 for d in depths(f[0]))

    return ExampleBundle("L2", A, pred, rec, None,
                         {"ef": False, "fo": "excluded", "witness": "a(_+_)",
                          "h0": "a", "h1": "a(a+a)"})


# ---------------------------------------------------------- L3

def _l3() -> ExampleBundle:
    A = Alphabet(("f", "t", "or", "and"))
    # 0, one true tree, one false tree, several true, several false, mixed, ill-formed
    states = ["0", "T1", "F1", "T+", "F+", "M", "bad"]
    truth = {"T1": {True}, "F1": {False}, "T+": {True}, "F+": {False}, "M": {True, False}}

    def add(p, q):
        if p == "0":
            return q
        if q == "0":
            return p
        if "bad" in (p, q):
            return "bad"
        vals = truth[p] | truth[q]
        if vals == {True}:
            return "T+"
        if vals == {False}:
            return "F+"
        return "M"

    def leaf(value):
        return lambda p: value if p == "0" else "bad"

    def node(op):
        def apply(p):
            if p not in truth:
                return "bad"
            vals = truth[p]
            return "T1" if (True in vals if op == "or" else vals == {True}) else "F1"
        return apply

    rec = _recognizer(A, states, add, {"f": leaf("F1"), "t": leaf("T1"),
                                       "or": node("or"), "and": node("and")}, {"T1"})

    def value(t):
        if t.label in ("f", "t"):
            return None if t.children else t.label == "t"
        if not t.children:
            return None
        vals = [value(c) for c in t.children]
        if None in vals:
            return None
        return any(vals) if t.label == "or" else all(vals)

    def pred(f):
        return len(f) == 1 and value(f[0]) is True

    return ExampleBundle("L3", A, pred, rec, None,
                         {"ef": False, "graded_pdl": "excluded", "aperiodic_v": True,
                          "witness": "or(and(_+_)+and(_+_))", "h0": "f", "h1": "t"})


_BUILDERS = {
    "some-node-a": _some_node_a,
    "some-path-Bstar-b": _some_path,
    "L1": _l1,
    "L2": _l2,
    "L3": _l3,
}
EXAMPLES = tuple(_BUILDERS)
_CACHE: dict = {}


def get_example(name: str) -> ExampleBundle:
    if name not in _BUILDERS:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


# ---------------------------------------------------------- collections

def corpus_formulas() -> list[tuple[str, Alphabet, Formula]]:
    """Formulas with their alphabets, used by the compile/semantics oracle."""
    ab = Alphabet(("a", "b"))
    abc = Alphabet(("a", "b", "c"))
    out = [
        ("E3 a+", Alphabet(("a",)), parse_formula("E[3]{a}/1+/")),
        ("E3 a+ over ab", ab, parse_formula("E[3]{a}/1+/")),
        ("EF a", ab, ef(Label("a"))),
        ("EF(b & EF a)", ab, parse_formula("EF (b & EF a)")),
        ("!EF a | EF b", ab, parse_formula("!EF a | EF b")),
        ("EU(a,b)", abc, ctl_eu(Label("a"), Label("b"))),
        ("EU(a|c, b & !EF c)", abc, parse_formula("EU(a | c, b & !EF c)")),
        ("nonempty", ab, exists(1, [], "1+")),
        ("L1", ab, l1_formula()),
        ("E2 even a-paths", ab, parse_formula("E[2]{a}/(11)+/")),
        ("true", ab, parse_formula("true")),
    ]
    return out


def counter_algebra() -> ForestAlgebra:
    """Counting to two: H = {0, 1, ≥2} with capped addition, V from insertions."""
    add = [[min(2, x + y) for y in range(3)] for x in range(3)]
    alg, _ = generate_algebra(add, 0, [], h_names=["0", "1", ">=2"])
    return alg


def corpus_algebras() -> dict[str, ForestAlgebra]:
    """Named algebras: the bases, the counter and every syntactic algebra."""
    from .algebra import trivial
    out = {"trivial": trivial(), "U1": u1(), "U2": u2(), "counter": counter_algebra()}
    for name in EXAMPLES:
        out[f"syn({name})"] = syntactic_algebra(get_example(name).recognizer).algebra
    for name, alphabet, phi in corpus_formulas():
        out[f"syn[{name}]"] = compile_to_recognizer(phi, alphabet).algebra
    return out


def path_algebras() -> dict[str, ForestAlgebra]:
    return {k: A for k, A in corpus_algebras().items() if check_path(A).holds}


def ef_algebras() -> dict[str, ForestAlgebra]:
    return {k: A for k, A in corpus_algebras().items() if check_ef(A).holds}


# ---------------------------------------------------------- suite

@dataclass
class SuiteResult:
    checks: list = field(default_factory=list)   # (name, ok, detail)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c[1]]

    def render(self) -> str:
        return "\n".join(f"[{'ok' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
                         for name, ok, detail in self.checks)


def _map_of(hom: Homomorphism, p: Forest) -> tuple:
    """``g ↦ p[g]`` with every hole holding ``g``."""
    k = hole_count(p)
    return tuple(eval_multicontext(hom, p, [g] * k) for g in range(hom.algebra.n_h))


def _letter_generators(r: Recognizer) -> list:
    return [(a, r.hom.image(a)) for a in r.alphabet]


def _vertical_example(res: SuiteResult, name: str, uniform: bool, p_text: str,
                      h0_text: str, h1_text: str) -> None:
    syn = syntactic_algebra(get_example(name).recognizer)
    A, hom = syn.algebra, syn.hom
    gens = _letter_generators(syn.recognizer)
    h0 = eval_forest(hom, parse_forest(h0_text))
    h1 = eval_forest(hom, parse_forest(h1_text))
    p = parse_forest(p_text)
    p_map = _map_of(hom, p)
    res.add(f"{name}: [{h0_text}] != [{h1_text}]", h0 != h1)
    res.add(f"{name}: p={p_text} swaps them", p_map[h0] == h1 and p_map[h1] == h0)
    kind = "uniform vertical" if uniform else "vertical"
    first = next(vertical_witnesses(A, uniform, gens), None)
    res.add(f"{name}: {kind} confusion detected and replayed",
            first is not None and first.replay(A), str(first))
    # the detector's closure must contain the map of p; report that witness on the 2-cycle
    match = next((w for w in vertical_witnesses(A, uniform, gens) if w.image == p_map), None)
    ok = match is not None
    if ok:
        match = replace(match, cycle=(h0, h1))
        ok = match.replay(A) and _map_of(match.hom(A), match.multicontext) == p_map
    res.add(f"{name}: detected witness matching p={p_text} replays on the cycle {{h0, h1}}", ok,
            str(match.expression) if match is not None else "no witness with that map")


def run_paper_suite(ef_reference: ForestAlgebra | None = None, oracle_nodes: int = 5) -> SuiteResult:
    """Recompute the worked examples and compare with the expected verdicts.

    ``ef_reference`` is the algebra the syntactic algebra of ``some-node-a``
    must be isomorphic to (``U1``); passing another algebra is a negative control.
    Recognizers are checked against their predicates up to ``oracle_nodes`` nodes.
    """
    res = SuiteResult()
    ref = u1() if ef_reference is None else ef_reference

    for name in EXAMPLES:
        bundle = get_example(name)
        bad = bundle.agrees_up_to(oracle_nodes)
        res.add(f"{name}: recognizer matches predicate up to {oracle_nodes} nodes",
                bad is None, "" if bad is None else f"disagree on {bad}")

    # some-node-a
    b = get_example("some-node-a")
    syn = syntactic_algebra(b.recognizer)
    res.add("some-node-a: EF identities hold", check_ef(syn.algebra).holds)
    res.add("some-node-a: syntactic algebra is isomorphic to the EF reference",
            is_isomorphic(syn.algebra, ref))
    rep = classification_report(syn.algebra)
    res.add("some-node-a: report says EF yes with nothing excluded",
            rep.ef.holds and "excluded" not in (rep.ctl, rep.fo, rep.graded_pdl))

    # L1: vertical confusion via a(_)+b(_) swapping [b] and [a(b)]
    _vertical_example(res, "L1", False, "a(_)+b(_)", "b", "a(b)")
    syn = syntactic_algebra(get_example("L1").recognizer)
    rep = classification_report(syn.algebra, _letter_generators(syn.recognizer))
    res.add("L1: EF no, CTL excluded, graded PDL not excluded",
            not rep.ef.holds and rep.ctl == "excluded" and rep.graded_pdl != "excluded")

    # L2: uniform vertical confusion via a(_+_) swapping even and odd trees
    _vertical_example(res, "L2", True, "a(_+_)", "a", "a(a+a)")
    syn = syntactic_algebra(get_example("L2").recognizer)
    rep = classification_report(syn.algebra, _letter_generators(syn.recognizer))
    res.add("L2: FO excluded", rep.fo == "excluded")

    # L3: horizontal confusion for {h0, h1}
    b = get_example("L3")
    syn = syntactic_algebra(b.recognizer)
    hom = syn.hom
    h0 = eval_forest(hom, parse_forest("f"))
    h1 = eval_forest(hom, parse_forest("t"))
    p = parse_forest("or(and(_+_)+and(_+_))")
    res.add("L3: p has horizontal confusion for {h0, h1}", has_horizontal_confusion(hom, p, {h0, h1}))
    res.add("L3: amplified p (k=2) has horizontal confusion for {h0, h1}",
            has_horizontal_confusion(hom, amplify(p, 2), {h0, h1}))
    w = horizontal_confusion(syn.algebra)
    res.add("L3: horizontal confusion detected with |G| = 2 and replayed",
            w is not None and len(w.subset) == 2 and w.replay(syn.algebra), str(w))
    rep = classification_report(syn.algebra)
    res.add("L3: graded PDL excluded", rep.graded_pdl == "excluded")
    res.add("L3: V is aperiodic", is_aperiodic(syn.algebra.V))
    return res
