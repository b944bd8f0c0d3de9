"""Identity checks for the base classes and the three confusion detectors.

Confusion is searched for over the alphabet ``V`` itself: a node labeled
``v`` evaluates to ``v`` applied to the value of its children.  Witnesses
carry a concrete multicontext over that alphabet so they can be replayed
by plain evaluation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .algebra import DEFAULT_LIMIT, ForestAlgebra, Homomorphism, SizeGuardExceeded
from .monoid import (ClosureLimitExceeded, Compose, Gen, PointwiseAdd, SelfAdd, Transformation,
                     Violation, closure_transformations, is_aperiodic, omega_power,
                     transformation_cycle)
from .terms import HOLE, HOLE_TREE, Alphabet, Forest, Tree, hole_count, substitute_all

__all__ = [
    "PropertyCheck", "check_ef", "check_distributive", "check_path", "vhat", "vtilde",
    "ConfusionWitness", "vertical_confusion", "uniform_vertical_confusion",
    "horizontal_confusion", "vertical_witnesses", "amplify", "vertical_symbols", "provenance_multicontext",
    "multicontext_values", "has_horizontal_confusion", "ClassificationReport",
    "classification_report", "HORIZONTAL_H_CAP",
]

HORIZONTAL_H_CAP = 12


class PropertyCheck(NamedTuple):
    holds: bool
    counterexample: Violation | None = None
    aperiodic_v: bool | None = None

    def __bool__(self):
        return self.holds


def _commutative(A: ForestAlgebra):
    add = A.h_add
    for g in range(A.n_h):
        for h in range(g + 1, A.n_h):
            if add[g][h] != add[h][g]:
                return Violation("H commutative", (g, h))
    return None


def check_ef(A: ForestAlgebra) -> PropertyCheck:
    """H idempotent and commutative and ``vh + h = vh`` everywhere."""
    add, act = A.h_add, A.act
    for h in range(A.n_h):
        if add[h][h] != h:
            return PropertyCheck(False, Violation("H idempotent", (h,)))
    bad = _commutative(A)
    if bad:
        return PropertyCheck(False, bad)
    for v in range(A.n_v):
        for h in range(A.n_h):
            if add[act[v][h]][h] != act[v][h]:
                return PropertyCheck(False, Violation("vh+h=vh", (v, h)))
    return PropertyCheck(True)


def check_distributive(A: ForestAlgebra) -> PropertyCheck:
    """H commutative and ``v(g + h) = vg + vh``; the flag records aperiodic V."""
    aper = is_aperiodic(A.V)
    bad = _commutative(A)
    if bad:
        return PropertyCheck(False, bad, aper)
    add, act = A.h_add, A.act
    for v in range(A.n_v):
        row = act[v]
        for g in range(A.n_h):
            for h in range(A.n_h):
                if row[add[g][h]] != add[row[g]][row[h]]:
                    return PropertyCheck(False, Violation("v(g+h)=vg+vh", (v, g, h)), aper)
    return PropertyCheck(True, None, aper)


def check_path(A: ForestAlgebra) -> PropertyCheck:
    """H aperiodic and commutative, ``vg + vh = v(g+h) + v0`` and
    ``u(g+h) = u(g + uh)`` for idempotent ``u``; the flag records aperiodic V."""
    aper = is_aperiodic(A.V)
    bad = _commutative(A)
    if bad:
        return PropertyCheck(False, bad, aper)
    if not is_aperiodic(A.H):
        x = next(x for x in range(A.n_h) if omega_power(A.H, x) != A.add(omega_power(A.H, x), x))
        return PropertyCheck(False, Violation("H aperiodic", (x,)), aper)
    add, act, zero = A.h_add, A.act, A.zero
    for v in range(A.n_v):
        row = act[v]
        v0 = row[zero]
        for g in range(A.n_h):
            for h in range(A.n_h):
                if add[row[g]][row[h]] != add[row[add[g][h]]][v0]:
                    return PropertyCheck(False, Violation("vg+vh=v(g+h)+v0", (v, g, h)), aper)
    for u in A.V.idempotents():
        row = act[u]
        for g in range(A.n_h):
            for h in range(A.n_h):
                if row[add[g][h]] != row[add[g][row[h]]]:
                    return PropertyCheck(False, Violation("u(g+h)=u(g+uh)", (u, g, h)), aper)
    return PropertyCheck(True, None, aper)


# ------------------------------------------------------------ closures

def vertical_symbols(A: ForestAlgebra) -> tuple:
    """Default generator names ``v0, v1, …`` for the elements of V."""
    return tuple((f"v{i}", i) for i in range(A.n_v))


def _generators(A: ForestAlgebra, generators) -> list:
    named = list(generators or ()) + list(vertical_symbols(A))
    return [(name, A.act[v]) for name, v in named]


def vhat(A: ForestAlgebra, generators: Sequence[tuple] | None = None,
         limit: int = DEFAULT_LIMIT) -> list[Transformation]:
    """Maps of all multicontexts with at least one hole: V closed under
    composition and pointwise addition.  ``generators`` are ``(name, v)``
    pairs listed ahead of the default names."""
    try:
        return closure_transformations(A.n_h, _generators(A, generators), ("compose", "add"),
                                       A.h_add, limit)
    except ClosureLimitExceeded:
        raise SizeGuardExceeded(f"closure exceeds {limit} maps") from None


def vtilde(A: ForestAlgebra, generators: Sequence[tuple] | None = None,
           limit: int = DEFAULT_LIMIT) -> list[Transformation]:
    """Maps of all uniform multicontexts: V closed under composition and m-fold self-sums."""
    try:
        return closure_transformations(A.n_h, _generators(A, generators), ("compose", "multiple"),
                                       A.h_add, limit)
    except ClosureLimitExceeded:
        raise SizeGuardExceeded(f"closure exceeds {limit} maps") from None


def provenance_multicontext(expr) -> Forest:
    """The multicontext over generator names whose map is ``expr``."""
    if isinstance(expr, Gen):
        return (Tree(expr.name, (HOLE_TREE,)),)
    if isinstance(expr, Compose):
        return substitute_all(provenance_multicontext(expr.outer), provenance_multicontext(expr.inner))
    if isinstance(expr, PointwiseAdd):
        return provenance_multicontext(expr.left) + provenance_multicontext(expr.right)
    if isinstance(expr, SelfAdd):
        return provenance_multicontext(expr.arg) * expr.times
    raise TypeError(f"not a provenance expression: {expr!r}")


def multicontext_values(hom: Homomorphism, p: Forest, choices: Sequence) -> frozenset:
    """All values of ``p`` when hole ``i`` ranges over ``choices[i]``.

    Holes are filled independently, so set-valued evaluation is exact.
    """
    A = hom.algebra
    it = iter(choices)

    def ev(forest):
        out = frozenset({A.zero})
        for t in forest:
            if t.label == HOLE:
                vals = frozenset(next(it))
            else:
                row = A.act[hom.image(t.label)]
                vals = frozenset(row[x] for x in ev(t.children))
            out = frozenset(A.h_add[x][y] for x in out for y in vals)
        return out

    return ev(p)


def has_horizontal_confusion(hom: Homomorphism, p: Forest, G) -> bool:
    """Direct check of ``G ⊆ p[g/x][G]`` for every hole ``x`` and ``g ∈ G``."""
    G = frozenset(G)
    n = hole_count(p)
    if len(G) < 2 or n == 0:
        return False
    for x in range(n):
        for g in G:
            choices = [G] * n
            choices[x] = {g}
            if not G <= multicontext_values(hom, p, choices):
                return False
    return True


def amplify(p: Forest, k: int) -> Forest:
    """``p_1 = p`` and ``p_k`` = ``p`` with ``p_{k-1}`` in every hole."""
    if k < 1:
        raise ValueError("k must be positive")
    if hole_count(p) == 0:
        raise ValueError("multicontext has no holes")
    out = p
    for _ in range(k - 1):
        out = substitute_all(p, out)
    return out


# ------------------------------------------------------------ witnesses

@dataclass(frozen=True)
class ConfusionWitness:
    """``kind`` is ``vertical``, ``uniform-vertical`` or ``horizontal``.

    Vertical kinds: ``expression`` is the provenance of the map and
    ``cycle`` lists ``g_0 … g_{k-1}`` with ``p[g_i] = g_{i+1 mod k}``.
    Horizontal: ``expression`` is the derivation trace of the profile and
    ``subset`` is ``G``.  ``multicontext`` is a concrete witness over the
    names in ``symbols``.
    """
    kind: str
    expression: object
    multicontext: Forest
    symbols: tuple
    cycle: tuple = ()
    subset: frozenset = frozenset()
    profile: tuple | None = field(default=None, compare=False)
    image: tuple | None = field(default=None, compare=False)

    def hom(self, A: ForestAlgebra) -> Homomorphism:
        names = dict(self.symbols)
        alphabet = Alphabet(tuple(names))
        return Homomorphism(alphabet, A, tuple(names[s] for s in alphabet))

    def replay(self, A: ForestAlgebra) -> bool:
        """Re-establish the confusion by evaluating the multicontext."""
        hom = self.hom(A)
        p = self.multicontext
        if self.kind == "horizontal":
            return has_horizontal_confusion(hom, p, self.subset)
        k = hole_count(p)
        if k == 0 or len(self.cycle) < 2 or len(set(self.cycle)) != len(self.cycle):
            return False
        if self.kind == "uniform-vertical" and not _is_uniform(p):
            return False
        for i, g in enumerate(self.cycle):
            vals = multicontext_values(hom, p, [{g}] * k)
            if vals != {self.cycle[(i + 1) % len(self.cycle)]}:
                return False
        return True

    def __str__(self):
        from .terms import format_forest
        if self.kind == "horizontal":
            return f"horizontal confusion for G={sorted(self.subset)} via p={format_forest(self.multicontext)}"
        return (f"{self.kind} confusion via p={format_forest(self.multicontext)} "
                f"cycling {' -> '.join(map(str, self.cycle))}")


def _is_uniform(p: Forest) -> bool:
    """Every leaf a hole and all subtrees at the same depth equal."""
    level = list(p)
    while level:
        if any(t != level[0] for t in level):
            return False
        if level[0].label == HOLE:
            return True
        if not level[0].children:
            return False
        level = [c for t in level for c in t.children]
    return False


def _cycle_of(image: Sequence[int]) -> tuple:
    for start in range(len(image)):
        seen = {}
        cur, k = start, 0
        while cur not in seen:
            seen[cur] = k
            cur = image[cur]
            k += 1
        if k - seen[cur] > 1:
            out = [cur]
            nxt = image[cur]
            while nxt != cur:
                out.append(nxt)
                nxt = image[nxt]
            return tuple(out)
    return ()


def vertical_witnesses(A: ForestAlgebra, uniform: bool = False,
                       generators: Sequence[tuple] | None = None, limit: int = DEFAULT_LIMIT):
    """Every non-aperiodic map of the closure as a witness, smallest provenance first."""
    kind = "uniform-vertical" if uniform else "vertical"
    maps = (vtilde if uniform else vhat)(A, generators, limit)
    symbols = tuple(list(generators or ()) + list(vertical_symbols(A)))
    for t in maps:
        if transformation_cycle(t.image)[1] > 1:
            yield ConfusionWitness(kind, t.provenance, provenance_multicontext(t.provenance),
                                   symbols, _cycle_of(t.image), image=t.image)


def vertical_confusion(A: ForestAlgebra, generators: Sequence[tuple] | None = None,
                       limit: int = DEFAULT_LIMIT) -> ConfusionWitness | None:
    """A witness of vertical confusion, or ``None`` if the closure is aperiodic."""
    return next(vertical_witnesses(A, False, generators, limit), None)


def uniform_vertical_confusion(A: ForestAlgebra, generators: Sequence[tuple] | None = None,
                               limit: int = DEFAULT_LIMIT) -> ConfusionWitness | None:
    """A witness of confusion for a uniform multicontext, or ``None``."""
    return next(vertical_witnesses(A, True, generators, limit), None)


def _subset_tables(A: ForestAlgebra, rows: list):
    """Subsets of ``H`` as bitmasks: images under each row, and ``x + Y`` for each ``x``."""
    full = 1 << A.n_h

    def lift(f):
        out = [0] * full
        for m in range(1, full):
            low = m & -m
            out[m] = out[m ^ low] | (1 << f(low.bit_length() - 1))
        return out

    images = [lift(lambda x, r=row: r[x]) for _, row in rows]
    sums = [lift(lambda y, r=A.h_add[x]: r[y]) for x in range(A.n_h)]
    return images, sums, {}


def _bits(m: int) -> frozenset:
    return frozenset(i for i in range(m.bit_length()) if m >> i & 1)


def _horizontal_for(A: ForestAlgebra, G: frozenset, rows: list, tables, limit: int):
    """Least profile set for ``G``; returns a confusing trace index path or ``None``.

    A profile is ``(family, F)``: ``F`` is the set of values of the
    multicontext with every hole ranging over ``G``, and ``family`` holds, for
    each hole and each ``g``, the set of values with that hole fixed to ``g``.
    """
    images, sums, memo = tables
    gmask = sum(1 << g for g in G)

    def plus(X, Y):
        key = X << 16 | Y
        out = memo.get(key)
        if out is None:
            out = 0
            x = X
            while x:
                low = x & -x
                out |= sums[low.bit_length() - 1][Y]
                x ^= low
            memo[key] = out
        return out

    base = (frozenset(1 << g for g in G), gmask)
    profiles = [base]
    index = {base: 0}
    parents: list = [("hole",)]

    def push(prof, parent):
        if prof in index:
            return None
        if len(profiles) >= limit:
            raise SizeGuardExceeded(f"more than {limit} profiles for G={sorted(G)}")
        index[prof] = len(profiles)
        profiles.append(prof)
        parents.append(parent)
        if all(X & gmask == gmask for X in prof[0]):
            return len(profiles) - 1
        return None

    k = 0
    while k < len(profiles):
        fam, F = profiles[k]
        for (v, _), img in zip(rows, images):
            hit = push((frozenset(img[X] for X in fam), img[F]), ("v", v, k))
            if hit is not None:
                return profiles, parents, hit
        for i in range(k + 1):
            fam2, F2 = profiles[i]
            for (a, fa, Fa), (b, fb, Fb) in (((k, fam, F), (i, fam2, F2)), ((i, fam2, F2), (k, fam, F))):
                prof = (frozenset(plus(X, Fb) for X in fa) | frozenset(plus(Fa, X) for X in fb),
                        plus(Fa, Fb))
                hit = push(prof, ("sum", a, b))
                if hit is not None:
                    return profiles, parents, hit
        k += 1
    return None


def _trace_multicontext(parents, i, symbol) -> Forest:
    node = parents[i]
    if node[0] == "hole":
        return (HOLE_TREE,)
    if node[0] == "v":
        return (Tree(symbol[node[1]], _trace_multicontext(parents, node[2], symbol)),)
    return _trace_multicontext(parents, node[1], symbol) + _trace_multicontext(parents, node[2], symbol)


def _trace_expression(parents, i):
    node = parents[i]
    if node[0] == "hole":
        return ("hole",)
    if node[0] == "v":
        return ("v", node[1], _trace_expression(parents, node[2]))
    return ("sum", _trace_expression(parents, node[1]), _trace_expression(parents, node[2]))


def horizontal_confusion(A: ForestAlgebra, max_h: int = HORIZONTAL_H_CAP,
                         limit: int = DEFAULT_LIMIT) -> ConfusionWitness | None:
    """Search subsets ``G`` by increasing size for a profile of confusion."""
    if A.n_h > max_h:
        raise SizeGuardExceeded(f"|H| = {A.n_h} exceeds the subset-search cap {max_h}")
    rows = []
    seen = set()
    for v in range(A.n_v):
        if A.act[v] not in seen:
            seen.add(A.act[v])
            rows.append((v, A.act[v]))
    symbols = vertical_symbols(A)
    symbol = {v: name for name, v in symbols}
    tables = _subset_tables(A, rows)
    for size in range(2, A.n_h + 1):
        for G in itertools.combinations(range(A.n_h), size):
            found = _horizontal_for(A, frozenset(G), rows, tables, limit)
            if found is not None:
                profiles, parents, hit = found
                fam, F = profiles[hit]
                return ConfusionWitness("horizontal", _trace_expression(parents, hit),
                                        _trace_multicontext(parents, hit, symbol), symbols,
                                        subset=frozenset(G),
                                        profile=(frozenset(map(_bits, fam)), _bits(F)))
    return None


# ------------------------------------------------------------ report

EXCLUDED = "excluded"
OPEN = "necessary conditions pass"
UNDECIDED = f"not decided (|H| above {HORIZONTAL_H_CAP})"


@dataclass
class ClassificationReport:
    ef: PropertyCheck
    distributive: PropertyCheck
    path: PropertyCheck
    aperiodic_v: bool
    idempotent_h: bool
    vertical: ConfusionWitness | None
    uniform: ConfusionWitness | None
    horizontal: ConfusionWitness | None
    ctl: str
    fo: str
    graded_pdl: str
    ctl_star_note: str
    pdl_note: str

    def as_dict(self) -> dict:
        def w(x):
            return None if x is None else str(x)

        def c(x):
            return {"holds": x.holds, "counterexample": None if x.counterexample is None else str(x.counterexample)}

        return {
            "ef": self.ef.holds, "ef_check": c(self.ef),
            "distributive": c(self.distributive), "path": c(self.path),
            "aperiodic_v": self.aperiodic_v, "idempotent_h": self.idempotent_h,
            "vertical_confusion": w(self.vertical), "uniform_vertical_confusion": w(self.uniform),
            "horizontal_confusion": w(self.horizontal),
            "ctl": self.ctl, "fo": self.fo, "graded_pdl": self.graded_pdl,
            "ctl_star_note": self.ctl_star_note, "pdl_note": self.pdl_note,
        }

    def render(self) -> str:
        def yn(b):
            return "yes" if b else "no"

        lines = [
            f"EF: {yn(self.ef.holds)}" + ("" if self.ef.holds else f" ({self.ef.counterexample})"),
            f"distributive: {yn(self.distributive.holds)}",
            f"path algebra: {yn(self.path.holds)}",
            f"aperiodic V: {yn(self.aperiodic_v)}",
            f"idempotent H: {yn(self.idempotent_h)}",
            f"vertical confusion: {self.vertical or 'none'}",
            f"uniform vertical confusion: {self.uniform or 'none'}",
            f"horizontal confusion: {self.horizontal or 'none'}",
            f"CTL: {self.ctl}",
            f"FO: {self.fo}",
            f"graded PDL: {self.graded_pdl}",
            f"CTL*: {self.ctl_star_note}",
            f"PDL: {self.pdl_note}",
        ]
        return "\n".join(lines)


def classification_report(A: ForestAlgebra, generators: Sequence[tuple] | None = None,
                          limit: int = DEFAULT_LIMIT) -> ClassificationReport:
    ef = check_ef(A)
    dist = check_distributive(A)
    path = check_path(A)
    aper = is_aperiodic(A.V)
    idem = A.H.is_idempotent()
    vert = vertical_confusion(A, generators, limit)
    unif = uniform_vertical_confusion(A, generators, limit)
    try:
        horiz = horizontal_confusion(A, limit=limit)
        gpdl = EXCLUDED if horiz else OPEN
    except SizeGuardExceeded:
        horiz, gpdl = None, UNDECIDED
    ctl = EXCLUDED if vert else OPEN
    fo = EXCLUDED if (unif or not aper) else OPEN
    if fo == EXCLUDED:
        ctl_star = "excluded with FO"
    else:
        ctl_star = ("H idempotent: CTL* iff FO" if idem
                    else "excluded (H not idempotent)")
    if gpdl == EXCLUDED:
        pdl = "excluded with graded PDL"
    elif gpdl == UNDECIDED:
        pdl = UNDECIDED
    else:
        pdl = ("H idempotent: PDL iff graded PDL" if idem
               else "excluded (H not idempotent)")
    return ClassificationReport(ef, dist, path, aper, idem, vert, unif, horiz,
                                ctl, fo, gpdl, ctl_star, pdl)
