"""Graded PDL over forests: formulas, semantics, word automata, compilation.

Tree formulas are label formulas, forest formulas and boolean combinations
of these.  Forest formulas are the constants, ``E^k L`` and boolean
combinations of forest formulas.  A tree ``a s`` tree-satisfies a forest
formula when ``s`` forest-satisfies it.

Word languages are over the letters ``1..n+1`` naming the members of the
unambiguous family built from ``n`` formulas.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from . import terms
from ._backend import kernels
from .algebra import (DEFAULT_LIMIT, Recognizer, minimize_implicit)
from .monoid import transformation_cycle
from .products import sequential_compose
from .terms import Alphabet, Forest, Tree

__all__ = [
    "Formula", "Const", "Label", "Not", "And", "Or", "Exists", "TRUE", "FALSE",
    "WordAutomaton", "RegexSyntaxError", "FormulaSyntaxError",
    "regex_to_dfa", "minimize_dfa", "dfa_is_aperiodic",
    "unambiguous_family", "exists", "ef", "ctl_eu", "is_forest_formula",
    "tree_sat", "forest_sat", "parse_formula", "format_formula",
    "Partition", "compose_languages", "compile_to_recognizer", "formula_labels",
]


# ------------------------------------------------------------ automata

@dataclass(frozen=True)
class WordAutomaton:
    """Complete DFA over letters ``1..n_letters``; ``delta[q][i-1]`` is the move on ``i``."""
    n_states: int
    initial: int
    delta: tuple
    finals: frozenset
    n_letters: int

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(tuple(r) for r in self.delta))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if len(self.delta) != self.n_states or any(len(r) != self.n_letters for r in self.delta):
            raise ValueError("transition table has the wrong shape")

    def step(self, q: int, letter: int) -> int:
        return self.delta[q][letter - 1]

    def run(self, word: Sequence[int], start: int | None = None) -> int:
        q = self.initial if start is None else start
        for x in word:
            q = self.delta[q][x - 1]
        return q

    def accepts(self, word: Sequence[int]) -> bool:
        return self.run(word) in self.finals

    def live_states(self) -> set:
        """States from which a final state is reachable."""
        live = set(self.finals)
        changed = True
        while changed:
            changed = False
            for q in range(self.n_states):
                if q not in live and any(r in live for r in self.delta[q]):
                    live.add(q)
                    changed = True
        return live


class RegexSyntaxError(ValueError):
    pass


def _regex_tokens(text: str):
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            out.append(("L", int(c)))
            i += 1
        elif c == "<":
            j = text.find(">", i)
            if j < 0 or not text[i + 1:j].isdigit():
                raise RegexSyntaxError(f"bad multi-digit letter at {i}")
            out.append(("L", int(text[i + 1:j])))
            i = j + 1
        elif c in "()|*+":
            out.append((c, None))
            i += 1
        else:
            raise RegexSyntaxError(f"unexpected {c!r} at {i}")
    return out


def _parse_regex(text: str):
    """AST: ('L', i) | ('cat', a, b) | ('alt', a, b) | ('star', a) | ('eps',)."""
    toks = _regex_tokens(text)
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def alt():
        nonlocal pos
        node = cat()
        while peek() == "|":
            pos += 1
            node = ("alt", node, cat())
        return node

    def cat():
        node = None
        while peek() in ("L", "("):
            part = post()
            node = part if node is None else ("cat", node, part)
        return ("eps",) if node is None else node

    def post():
        nonlocal pos
        node = atom()
        while peek() in ("*", "+"):
            op = peek()
            pos += 1
            node = ("star", node) if op == "*" else ("cat", node, ("star", node))
        return node

    def atom():
        nonlocal pos
        kind, val = toks[pos]
        pos += 1
        if kind == "L":
            return ("L", val)
        node = alt()
        if peek() != ")":
            raise RegexSyntaxError("expected ')'")
        pos += 1
        return node

    node = alt()
    if pos != len(toks):
        raise RegexSyntaxError(f"unexpected {toks[pos][0]!r}")
    return node


def _letters(node, out):
    if node[0] == "L":
        out.add(node[1])
    for child in node[1:]:
        if isinstance(child, tuple):
            _letters(child, out)
    return out


def regex_to_dfa(regex: str, n_letters: int | None = None) -> WordAutomaton:
    """Minimal complete DFA of ``regex`` (operators ``|``, ``*``, ``+``, grouping)."""
    ast = _parse_regex(regex)
    used = _letters(ast, set())
    if n_letters is None:
        n_letters = max(used, default=1)
    if any(not 1 <= x <= n_letters for x in used):
        raise RegexSyntaxError(f"letters must lie in 1..{n_letters}")
    # Thompson construction: eps[q] and moves[q] = {letter: targets}
    eps: list[set] = []
    moves: list[dict] = []

    def new():
        eps.append(set())
        moves.append({})
        return len(eps) - 1

    def build(node):
        kind = node[0]
        s, f = new(), new()
        if kind == "eps":
            eps[s].add(f)
        elif kind == "L":
            moves[s].setdefault(node[1], set()).add(f)
        elif kind == "cat":
            s1, f1 = build(node[1])
            s2, f2 = build(node[2])
            eps[s] |= {s1}
            eps[f1] |= {s2}
            eps[f2] |= {f}
        elif kind == "alt":
            s1, f1 = build(node[1])
            s2, f2 = build(node[2])
            eps[s] |= {s1, s2}
            eps[f1] |= {f}
            eps[f2] |= {f}
        else:
            s1, f1 = build(node[1])
            eps[s] |= {s1, f}
            eps[f1] |= {s1, f}
        return s, f

    start, final = build(ast)

    def closure(states):
        stack, out = list(states), set(states)
        while stack:
            q = stack.pop()
            for r in eps[q]:
                if r not in out:
                    out.add(r)
                    stack.append(r)
        return frozenset(out)

    init = closure({start})
    index = {init: 0}
    order = [init]
    delta = []
    k = 0
    while k < len(order):
        cur = order[k]
        row = []
        for x in range(1, n_letters + 1):
            nxt = closure({r for q in cur for r in moves[q].get(x, ())})
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta.append(row)
        k += 1
    finals = {i for i, s in enumerate(order) if final in s}
    return minimize_dfa(WordAutomaton(len(order), 0, delta, finals, n_letters))


def minimize_dfa(dfa: WordAutomaton) -> WordAutomaton:
    """Moore refinement on the reachable part; states renumbered by BFS order."""
    reach = [dfa.initial]
    seen = {dfa.initial}
    for q in reach:
        for r in dfa.delta[q]:
            if r not in seen:
                seen.add(r)
                reach.append(r)
    block = {q: int(q in dfa.finals) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[r] for r in dfa.delta[q]) for q in reach}
        ids: dict = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new
    # renumber by BFS from the initial state
    rename: dict = {}
    queue = [dfa.initial]
    while queue:
        q = queue.pop(0)
        if block[q] in rename:
            continue
        rename[block[q]] = len(rename)
        queue.extend(dfa.delta[q])
    reps = {}
    for q in reach:
        reps.setdefault(rename[block[q]], q)
    delta = [[rename[block[r]] for r in dfa.delta[reps[i]]] for i in range(len(rename))]
    finals = {rename[block[q]] for q in reach if q in dfa.finals}
    return WordAutomaton(len(rename), 0, delta, finals, dfa.n_letters)


def dfa_is_aperiodic(dfa: WordAutomaton) -> bool:
    """Whether the transition monoid of the minimal DFA has only trivial groups."""
    m = minimize_dfa(dfa)
    gens = [tuple(m.delta[q][x] for q in range(m.n_states)) for x in range(m.n_letters)]
    if not gens:
        return True
    images, _ = kernels.monoid_closure(gens)
    return all(transformation_cycle(img)[1] == 1 for img in images)


# ------------------------------------------------------------ formulas

class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Label(Formula):
    symbol: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Exists(Formula):
    """``E^k L`` over the family generated by ``psis``."""
    k: int
    psis: tuple
    family: tuple
    dfa: WordAutomaton
    regex: str | None = None
    sugar: str | None = field(default=None, compare=False)


TRUE = Const(True)
FALSE = Const(False)


def unambiguous_family(psis: Sequence[Formula]) -> list[Formula]:
    """``φ_i = ψ_i ∧ ¬ψ_1 ∧ … ∧ ¬ψ_{i-1}`` and ``φ_{n+1} = ¬ψ_1 ∧ … ∧ ¬ψ_n``."""
    psis = list(psis)
    out = []
    for i, psi in enumerate(psis):
        out.append(And((psi,) + tuple(Not(p) for p in psis[:i])) if i else psi)
    if not psis:
        out.append(TRUE)
    elif len(psis) == 1:
        out.append(Not(psis[0]))
    else:
        out.append(And(tuple(Not(p) for p in psis)))
    return out


def exists(k: int, psis: Sequence[Formula], language, sugar: str | None = None) -> Exists:
    """``E^k L``; ``language`` is a regex string or a :class:`WordAutomaton`."""
    if k < 1:
        raise ValueError("k must be positive")
    psis = tuple(psis)
    family = tuple(unambiguous_family(psis))
    if isinstance(language, WordAutomaton):
        if language.n_letters != len(family):
            raise ValueError("automaton alphabet must match the family size")
        return Exists(k, psis, family, language, None, sugar)
    return Exists(k, psis, family, regex_to_dfa(language, len(family)), language, sugar)


def ef(psi: Formula) -> Exists:
    """Some subtree satisfies ``psi``: ``Φ = {ψ, ¬ψ}``, ``L = (¬ψ)*ψ``."""
    return exists(1, [psi], "2*1", sugar="EF")


def ctl_eu(psi: Formula, phi: Formula) -> Exists:
    """``E ψ U φ``: family ``[φ, ψ∧¬φ, ¬ψ∧¬φ]`` and ``L = (ψ∧¬φ)*φ``."""
    return exists(1, [phi, psi], "2*1", sugar="EU")


def is_forest_formula(phi: Formula) -> bool:
    if isinstance(phi, (Const, Exists)):
        return True
    if isinstance(phi, Label):
        return False
    if isinstance(phi, Not):
        return is_forest_formula(phi.arg)
    return all(is_forest_formula(a) for a in phi.args)


def formula_labels(phi: Formula) -> set:
    if isinstance(phi, Label):
        return {phi.symbol}
    if isinstance(phi, Const):
        return set()
    if isinstance(phi, Not):
        return formula_labels(phi.arg)
    if isinstance(phi, Exists):
        return set().union(*[formula_labels(p) for p in phi.psis]) if phi.psis else set()
    return set().union(*[formula_labels(a) for a in phi.args])


# ------------------------------------------------------------ semantics

class _Sat:
    """Direct semantics with per-call memoization on (subtree, formula).

    Keys are object ids: every subforest and subformula stays alive for the
    duration of a call, and hashing whole forests dominated the run time.
    """

    def __init__(self):
        self.memo: dict = {}

    def tree(self, t: Tree, phi: Formula) -> bool:
        kind = type(phi)
        if kind is Label:
            return t.label == phi.symbol
        if kind is Exists:
            return self.forest(t.children, phi)
        if kind is Not:
            return not self.tree(t, phi.arg)
        if kind is And:
            return all(self.tree(t, a) for a in phi.args)
        if kind is Or:
            return any(self.tree(t, a) for a in phi.args)
        if kind is Const:
            return phi.value
        raise TypeError(f"not a formula: {phi!r}")

    def forest(self, s: Forest, phi: Formula) -> bool:
        kind = type(phi)
        if kind is Exists:
            key = (id(s), id(phi))
            got = self.memo.get(key)
            if got is None:
                got = self.memo[key] = self._count(s, phi) >= phi.k
            return got
        if kind is Const:
            return phi.value
        if kind is Not:
            return not self.forest(s, phi.arg)
        if kind is And:
            return all(self.forest(s, a) for a in phi.args)
        if kind is Or:
            return any(self.forest(s, a) for a in phi.args)
        if kind is Label:
            raise ValueError(f"label formula {phi.symbol!r} has no forest semantics")
        raise TypeError(f"not a formula: {phi!r}")

    def _count(self, s: Forest, phi: Exists) -> int:
        dfa, family, tree = phi.dfa, tuple(enumerate(phi.family, 1)), self.tree
        count = 0
        stack = [(t, dfa.initial) for t in s]
        while stack and count < phi.k:
            t, q = stack.pop()
            letter = next(i for i, f in family if tree(t, f))
            q = dfa.step(q, letter)
            if q in dfa.finals:
                count += 1
            stack.extend((c, q) for c in t.children)
        return count


def tree_sat(t: Tree, phi: Formula) -> bool:
    return _Sat().tree(t, phi)


def forest_sat(s: Forest, phi: Formula) -> bool:
    return _Sat().forest(s, phi)


# ------------------------------------------------------------ syntax

class FormulaSyntaxError(ValueError):
    pass


_FTOKEN = re.compile(r"\s*(?:(E\[\d+\])|([A-Za-z][A-Za-z0-9]*)|(/[^/]*/)|([!&|(){};,]))")


def _formula_tokens(text: str):
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _FTOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        out.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    return out


_KEYWORDS = {"true", "false", "EF", "EU", "E"}


def parse_formula(text: str, alphabet: Alphabet | None = None) -> Formula:
    """Parse ``a``, ``true``, ``false``, ``!φ``, ``φ & φ``, ``φ | φ``, ``EF φ``,
    ``EU(ψ, φ)`` and ``E[k]{ψ1;…;ψn}/regex/`` (``E{…}/…/`` means ``k = 1``)."""
    toks = _formula_tokens(text)
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def expect(tok):
        nonlocal pos
        if peek() != tok:
            where = toks[pos][1] if pos < len(toks) else len(text)
            raise FormulaSyntaxError(f"expected {tok!r} at position {where}")
        pos += 1

    def disj():
        nonlocal pos
        args = [conj()]
        while peek() == "|":
            pos += 1
            args.append(conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj():
        nonlocal pos
        args = [unary()]
        while peek() == "&":
            pos += 1
            args.append(unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of formula")
        if tok == "!":
            pos += 1
            return Not(unary())
        if tok == "(":
            pos += 1
            inner = disj()
            expect(")")
            return inner
        if tok == "true":
            pos += 1
            return TRUE
        if tok == "false":
            pos += 1
            return FALSE
        if tok == "EF":
            pos += 1
            return ef(unary())
        if tok == "EU":
            pos += 1
            expect("(")
            psi = disj()
            expect(",")
            phi = disj()
            expect(")")
            return ctl_eu(psi, phi)
        if tok == "E" or tok.startswith("E["):
            pos += 1
            k = int(tok[2:-1]) if tok.startswith("E[") else 1
            expect("{")
            psis = []
            if peek() != "}":
                psis.append(disj())
                while peek() == ";":
                    pos += 1
                    psis.append(disj())
            expect("}")
            reg = peek()
            if reg is None or not reg.startswith("/"):
                raise FormulaSyntaxError("expected /regex/")
            pos += 1
            return exists(k, psis, reg[1:-1])
        if tok[0].isalpha():
            if alphabet is not None and tok not in alphabet:
                raise terms.UnknownSymbolError(f"unknown symbol {tok!r}")
            pos += 1
            return Label(tok)
        raise FormulaSyntaxError(f"unexpected {tok!r} at position {toks[pos][1]}")

    phi = disj()
    if pos != len(toks):
        raise FormulaSyntaxError(f"unexpected {peek()!r} at position {toks[pos][1]}")
    return phi


def format_formula(phi: Formula) -> str:
    """Text that :func:`parse_formula` maps back to an equal formula."""
    def atom(f):
        s = fmt(f)
        return s if isinstance(f, (Label, Const, Exists, Not)) else f"({s})"

    def fmt(f):
        if isinstance(f, Const):
            return "true" if f.value else "false"
        if isinstance(f, Label):
            return f.symbol
        if isinstance(f, Not):
            return "!" + atom(f.arg)
        if isinstance(f, And):
            return " & ".join(atom(a) for a in f.args)
        if isinstance(f, Or):
            return " | ".join(atom(a) for a in f.args)
        if isinstance(f, Exists):
            if f.sugar == "EF" and f == ef(f.psis[0]):
                return "EF " + atom(f.psis[0])
            if f.sugar == "EU" and f == ctl_eu(f.psis[1], f.psis[0]):
                return f"EU({fmt(f.psis[1])}, {fmt(f.psis[0])})"
            if f.regex is None:
                raise ValueError("formula built from an explicit automaton has no text form")
            head = "E" if f.k == 1 else f"E[{f.k}]"
            return head + "{" + "; ".join(fmt(p) for p in f.psis) + "}/" + f.regex + "/"
        raise TypeError(f"not a formula: {f!r}")

    return fmt(phi)


# ------------------------------------------------------------ composition

@dataclass(frozen=True)
class Partition:
    """A partition of all forests: block ``labeling[h]`` holds the forests of value ``h``."""
    recognizer_hom: object
    labeling: tuple

    def __post_init__(self):
        object.__setattr__(self, "labeling", tuple(self.labeling))
        if len(self.labeling) != self.recognizer_hom.algebra.n_h:
            raise ValueError("labeling must cover every horizontal element")

    @property
    def blocks(self) -> tuple:
        return tuple(dict.fromkeys(self.labeling))


def compose_languages(L: Recognizer, parts: Partition, limit: int = DEFAULT_LIMIT) -> Recognizer:
    """``L[L1,…,Lk]``: forests whose relabeling by subforest blocks lies in ``L``."""
    alpha = parts.recognizer_hom
    alphabet = alpha.alphabet
    expected = alphabet.product(parts.blocks)
    if set(L.alphabet) - set(expected) or set(expected) - set(L.alphabet):
        raise ValueError("L must be over pairs (letter, block name)")
    from .algebra import Homomorphism
    pair_alphabet = alphabet.product(range(alpha.algebra.n_h))
    beta = Homomorphism(pair_alphabet, L.algebra,
                        tuple(L.hom.image((a, parts.labeling[g])) for a, g in pair_alphabet))
    hom = sequential_compose(alpha, beta).materialize(limit)
    n2 = L.algebra.n_h
    accepting = frozenset(h for h in range(hom.algebra.n_h) if h % n2 in L.accepting)
    return Recognizer(hom, accepting)


# ------------------------------------------------------------ compilation

def _tree_eval(phi: Formula, letter, truth: dict) -> bool:
    """Tree satisfaction given the root letter and the truth of forest subformulas."""
    if is_forest_formula(phi):
        return truth[phi]
    if isinstance(phi, Label):
        return letter == phi.symbol
    if isinstance(phi, Not):
        return not _tree_eval(phi.arg, letter, truth)
    if isinstance(phi, And):
        return all(_tree_eval(a, letter, truth) for a in phi.args)
    if isinstance(phi, Or):
        return any(_tree_eval(a, letter, truth) for a in phi.args)
    raise TypeError(f"not a formula: {phi!r}")


def _forest_parts(phi: Formula, out: list) -> list:
    """Maximal forest subformulas of a tree formula, in first-seen order."""
    if is_forest_formula(phi):
        if phi not in out:
            out.append(phi)
    elif isinstance(phi, Not):
        _forest_parts(phi.arg, out)
    elif isinstance(phi, (And, Or)):
        for a in phi.args:
            _forest_parts(a, out)
    return out


def _compile(phi: Formula, alphabet: Alphabet, limit: int, cache: dict):
    if phi in cache:
        return cache[phi]
    if isinstance(phi, Const):
        res = minimize_implicit(alphabet, 0, lambda x, y: 0, lambda a, x: 0, lambda x: phi.value, limit)
    elif isinstance(phi, (Not, And, Or)):
        args = [phi.arg] if isinstance(phi, Not) else list(phi.args)
        subs = [_compile(a, alphabet, limit, cache).recognizer for a in args]
        algs = [r.algebra for r in subs]
        letters = [dict(zip(alphabet, r.hom.letter_image)) for r in subs]

        def add(x, y):
            return tuple(A.h_add[a][b] for A, a, b in zip(algs, x, y))

        def act(letter, x):
            return tuple(A.act[m[letter]][a] for A, m, a in zip(algs, letters, x))

        def accept(x):
            vals = [a in r.accepting for a, r in zip(x, subs)]
            if isinstance(phi, Not):
                return not vals[0]
            return all(vals) if isinstance(phi, And) else any(vals)

        zero = tuple(A.zero for A in algs)
        res = minimize_implicit(alphabet, zero, add, act, accept, limit)
    elif isinstance(phi, Exists):
        res = _compile_exists(phi, alphabet, limit, cache)
    else:
        raise ValueError(f"{format_formula(phi)} is a tree formula, not a forest formula")
    cache[phi] = res
    return res


def _compile_exists(phi: Exists, alphabet: Alphabet, limit: int, cache: dict):
    parts: list = []
    for f in phi.family:
        _forest_parts(f, parts)
    subs = [_compile(p, alphabet, limit, cache).recognizer for p in parts]
    algs = [r.algebra for r in subs]
    letters = [dict(zip(alphabet, r.hom.letter_image)) for r in subs]
    dfa, k = phi.dfa, phi.k
    n_q = dfa.n_states
    finals = dfa.finals
    label_memo: dict = {}

    def label(letter, p):
        key = (letter, p)
        if key not in label_memo:
            truth = {f: h in r.accepting for f, h, r in zip(parts, p, subs)}
            label_memo[key] = next(i for i, f in enumerate(phi.family, 1)
                                   if _tree_eval(f, letter, truth))
        return label_memo[key]

    def add(x, y):
        (p, c), (p2, c2) = x, y
        return (tuple(A.h_add[a][b] for A, a, b in zip(algs, p, p2)),
                tuple(min(k, a + b) for a, b in zip(c, c2)))

    def act(letter, x):
        p, c = x
        i = label(letter, p)
        out = []
        for q in range(n_q):
            r = dfa.delta[q][i - 1]
            out.append(min(k, c[r] + (r in finals)))
        return tuple(A.act[m[letter]][a] for A, m, a in zip(algs, letters, p)), tuple(out)

    zero = (tuple(A.zero for A in algs), (0,) * n_q)
    return minimize_implicit(alphabet, zero, add, act, lambda x: x[1][dfa.initial] >= k, limit)


def compile_to_recognizer(phi: Formula, alphabet: Alphabet, limit: int = DEFAULT_LIMIT) -> Recognizer:
    """Minimal recognizer of the forests that forest-satisfy ``phi``."""
    unknown = formula_labels(phi) - set(alphabet)
    if unknown:
        raise terms.UnknownSymbolError(f"symbols {sorted(unknown)} are not in the alphabet")
    if not is_forest_formula(phi):
        raise ValueError(f"{format_formula(phi)} is a tree formula, not a forest formula")
    return _compile(phi, alphabet, limit, {}).recognizer
