"""EF algebras as divisors of iterated wreath products of U1, and the
distributive quotient of a path algebra.

The EF construction works on the order ``g ≤ h`` iff ``g = h + g`` of an
idempotent commutative H.  ``∞`` (the sum of all elements) is the least
element.  A subminimal element is minimal in ``H \\ {∞}``; for such ``h``
every ``v`` sends ``h`` to ``h`` or ``∞``.

* several subminimal elements: ``H`` embeds in the product of the
  algebras ``H_h = {∞} ∪ {g : h ∈ Vg}`` (the star action sends values that
  leave ``H_h`` to ``∞``);
* one subminimal element ``h``: ``G = H \\ {∞}`` with the double-star action
  (values ``∞`` become ``h``) and ``H`` embeds in ``(G, W) ∘ U1``.

Embeddings are homomorphisms into the subalgebra generated by the image:
vertical elements are compared by their action on the image of ``H``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .algebra import (DEFAULT_LIMIT, ForestAlgebra, generate_algebra, trivial, u1)
from .classify import check_distributive, check_ef, check_path
from .monoid import Violation, additive_omega_multiple
from .products import Atom, Product, Wreath, expression_h_size, realize_expression

__all__ = [
    "NotEFAlgebra", "NotPathAlgebra", "Embedding", "ef_decompose", "verify_embedding",
    "identity_embedding", "u1_count", "wreath_depth", "subminimal_elements",
    "QuotientMap", "distributive_quotient", "verify_quotient",
]

U1_ONE, U1_CONST = 0, 1      # vertical elements of U1
U1_ZERO, U1_INF = 0, 1       # horizontal elements of U1


class NotEFAlgebra(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(f"not an EF algebra: {violation}")
        self.violation = violation


class NotPathAlgebra(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(f"not a path algebra: {violation}")
        self.violation = violation


@dataclass(frozen=True)
class Embedding:
    """``h_map`` and ``v_map`` send ``source`` into ``target``, the algebra
    generated by the image inside the realization of ``expression``.
    ``v_struct`` holds the structured vertical elements of the expression."""
    source: ForestAlgebra
    expression: object
    target: ForestAlgebra
    h_map: tuple
    v_map: tuple
    v_struct: tuple = ()

    @property
    def u1_atoms(self) -> int:
        return u1_count(self.expression)

    @property
    def depth(self) -> int:
        return wreath_depth(self.expression)


def u1_count(e) -> int:
    if isinstance(e, Atom):
        return 1 if e.name == "U1" else 0
    return sum(u1_count(p) for p in e.parts)


def wreath_depth(e) -> int:
    """Number of factors along the longest wreath chain."""
    if isinstance(e, Atom):
        return 1
    if isinstance(e, Product):
        return max(wreath_depth(p) for p in e.parts)
    return sum(wreath_depth(p) for p in e.parts)


# ------------------------------------------------------------ EF

def _infinity(A: ForestAlgebra) -> int:
    return A.hsum(range(A.n_h))


def _leq(A: ForestAlgebra, g: int, h: int) -> bool:
    return A.h_add[h][g] == g


def subminimal_elements(A: ForestAlgebra) -> list[int]:
    """Minimal elements of ``H \\ {∞}``, in index order."""
    inf = _infinity(A)
    rest = [g for g in range(A.n_h) if g != inf]
    return [h for h in rest if not any(g != h and _leq(A, g, h) for g in rest)]


class _Part(NamedTuple):
    expression: object
    h_map: list      # source H -> H of the expression
    v_struct: list   # source V -> structured vertical element


def _restrict(A: ForestAlgebra, elements: list[int], rows: list[tuple]):
    """Algebra on ``elements`` (a submonoid) whose V is generated by ``rows``
    (maps on ``elements`` given as tuples of elements).  Returns
    ``(algebra, pos, gen_index)``."""
    pos = {g: i for i, g in enumerate(elements)}
    h_add = [[pos[A.h_add[x][y]] for y in elements] for x in elements]
    gens = [tuple(pos[y] for y in r) for r in rows]
    alg, gen_index = generate_algebra(h_add, pos[A.zero], gens)
    return alg, pos, gen_index


def _decompose(A: ForestAlgebra) -> _Part:
    if A.n_h == 1:
        return _Part(Atom("U1"), [U1_ZERO], [U1_ONE] * A.n_v)
    if A.n_h == 2:
        inf = 1 - A.zero
        h_map = [0, 0]
        h_map[A.zero], h_map[inf] = U1_ZERO, U1_INF
        v_struct = [U1_ONE if A.act[v][A.zero] == A.zero else U1_CONST for v in range(A.n_v)]
        return _Part(Atom("U1"), h_map, v_struct)
    inf = _infinity(A)
    subs = subminimal_elements(A)
    if len(subs) > 1:
        return _decompose_product(A, inf, subs)
    return _decompose_wreath(A, inf, subs[0])


def _decompose_product(A: ForestAlgebra, inf: int, subs: list[int]) -> _Part:
    parts = []
    for h in subs:
        members = sorted({inf} | {g for g in range(A.n_h)
                                  if any(A.act[v][g] == h for v in range(A.n_v))})
        if len(members) >= A.n_h:
            raise AssertionError(f"H_{h} is not smaller than H")
        inside = set(members)
        rows = [tuple(A.act[v][g] if A.act[v][g] in inside else inf for g in members)
                for v in range(A.n_v)]
        sub, pos, gen_index = _restrict(A, members, rows)
        part = _decompose(sub)
        iota = [pos[g] if g in inside else pos[inf] for g in range(A.n_h)]
        parts.append((part, [part.h_map[iota[g]] for g in range(A.n_h)],
                      [part.v_struct[gen_index[v]] for v in range(A.n_v)]))
    sizes = [expression_h_size(p.expression) for p, _, _ in parts]
    h_map = []
    for g in range(A.n_h):
        idx = 0
        for (_, hm, _), n in zip(parts, sizes):
            idx = idx * n + hm[g]
        h_map.append(idx)
    v_struct = [tuple(vs[v] for _, _, vs in parts) for v in range(A.n_v)]
    return _Part(Product(tuple(p.expression for p, _, _ in parts)), h_map, v_struct)


def _decompose_wreath(A: ForestAlgebra, inf: int, h: int) -> _Part:
    members = [g for g in range(A.n_h) if g != inf]
    rows = [tuple(A.act[v][g] if A.act[v][g] != inf else h for g in members)
            for v in range(A.n_v)]
    sub, pos, gen_index = _restrict(A, members, rows)
    left = _decompose(sub)
    n_left = expression_h_size(left.expression)
    # image of g in H(left); f_v is extended by the identity off this image
    image = {left.h_map[pos[g]]: g for g in members}
    h_map = [left.h_map[pos[g]] * 2 + U1_ZERO if g != inf else left.h_map[pos[h]] * 2 + U1_INF
             for g in range(A.n_h)]
    v_struct = []
    for v in range(A.n_v):
        table = tuple(
            (U1_CONST if A.act[v][image[x]] == inf else U1_ONE) if x in image else U1_ONE
            for x in range(n_left))
        v_struct.append((left.v_struct[gen_index[v]], table))
    if isinstance(left.expression, Wreath):
        expr = Wreath(left.expression.parts + (Atom("U1"),))
    else:
        expr = Wreath((left.expression, Atom("U1")))
    return _Part(expr, h_map, v_struct)


def ef_decompose(A: ForestAlgebra, limit: int = DEFAULT_LIMIT) -> Embedding:
    """Embed an EF algebra into (a subalgebra of) an iterated wreath product of U1."""
    check = check_ef(A)
    if not check.holds:
        raise NotEFAlgebra(check.counterexample)
    part = _decompose(A)
    target, gen_index = realize_expression(part.expression, generators=part.v_struct, limit=limit)
    return Embedding(A, part.expression, target, tuple(part.h_map), tuple(gen_index),
                     tuple(part.v_struct))


def identity_embedding(A: ForestAlgebra, name: str = "A") -> Embedding:
    return Embedding(A, Atom(name, A), A, tuple(range(A.n_h)), tuple(range(A.n_v)),
                     tuple(range(A.n_v)))


def verify_embedding(e: Embedding) -> Violation | None:
    """First failed law of the embedding, or ``None``.

    Checks injectivity of ``h_map``, zero and sums, compatibility with the
    action, and multiplicativity and identity of ``v_map`` on the image.
    """
    A, B = e.source, e.target
    hm, vm = e.h_map, e.v_map
    if len(hm) != A.n_h or len(vm) != A.n_v:
        return Violation("map sizes", (len(hm), len(vm)))
    if any(not 0 <= x < B.n_h for x in hm) or any(not 0 <= x < B.n_v for x in vm):
        return Violation("map range", ())
    if len(set(hm)) != len(hm):
        g = next(g for g in range(A.n_h) if hm.index(hm[g]) != g)
        return Violation("h_map injective", (hm.index(hm[g]), g))
    if hm[A.zero] != B.zero:
        return Violation("zero", (A.zero,))
    for g in range(A.n_h):
        for h in range(A.n_h):
            if hm[A.h_add[g][h]] != B.h_add[hm[g]][hm[h]]:
                return Violation("additive", (g, h))
    for v in range(A.n_v):
        row = B.act[vm[v]]
        for g in range(A.n_h):
            if hm[A.act[v][g]] != row[hm[g]]:
                return Violation("action", (v, g))
    image = sorted(set(hm))
    for x in image:
        if B.act[vm[A.one]][x] != x:
            return Violation("identity", (A.one, x))
    for v in range(A.n_v):
        for w in range(A.n_v):
            vw = B.act[vm[A.v_mul[v][w]]]
            rv, rw = B.act[vm[v]], B.act[vm[w]]
            for x in image:
                if vw[x] != rv[rw[x]]:
                    return Violation("multiplicative", (v, w, x))
    return None


# ------------------------------------------------------------ distributive quotient

@dataclass(frozen=True)
class QuotientMap:
    """Surjective homomorphism ``source → target`` with ``h ↦ ω·h`` and ``v ↦ v̄``."""
    source: ForestAlgebra
    target: ForestAlgebra
    h_map: tuple
    v_map: tuple
    idempotents: tuple     # source elements forming the target's H, in order


def distributive_quotient(A: ForestAlgebra) -> QuotientMap:
    """``(e(H), V̄)`` with ``v̄ e = ω·(ve)``, and the map ``h ↦ ω·h``, ``v ↦ v̄``."""
    check = check_path(A)
    if not check.holds:
        raise NotPathAlgebra(check.counterexample)
    H = A.H
    omega = [additive_omega_multiple(H, h) for h in range(A.n_h)]
    elems = H.idempotents()
    pos = {e: i for i, e in enumerate(elems)}
    h_add = [[pos[A.h_add[x][y]] for y in elems] for x in elems]
    rows = [tuple(pos[omega[A.act[v][e]]] for e in elems) for v in range(A.n_v)]
    names = [A.h_name(e) for e in elems] if A.h_names else None
    target, gen_index = generate_algebra(h_add, pos[A.zero], rows, h_names=names)
    return QuotientMap(A, target, tuple(pos[omega[h]] for h in range(A.n_h)), tuple(gen_index),
                       tuple(elems))


def verify_quotient(q: QuotientMap) -> Violation | None:
    """Homomorphism laws, surjectivity and distributivity of the target."""
    A, B = q.source, q.target
    hm, vm = q.h_map, q.v_map
    if set(hm) != set(range(B.n_h)):
        return Violation("surjective on H", tuple(sorted(set(range(B.n_h)) - set(hm))))
    if set(vm) != set(range(B.n_v)):
        return Violation("surjective on V", tuple(sorted(set(range(B.n_v)) - set(vm))))
    if hm[A.zero] != B.zero or vm[A.one] != B.one:
        return Violation("units", ())
    for g in range(A.n_h):
        for h in range(A.n_h):
            if hm[A.h_add[g][h]] != B.h_add[hm[g]][hm[h]]:
                return Violation("additive", (g, h))
    for v in range(A.n_v):
        for g in range(A.n_h):
            if hm[A.act[v][g]] != B.act[vm[v]][hm[g]]:
                return Violation("action", (v, g))
    for v in range(A.n_v):
        for w in range(A.n_v):
            if vm[A.v_mul[v][w]] != B.v_mul[vm[v]][vm[w]]:
                return Violation("multiplicative", (v, w))
    if not B.H.is_idempotent():
        return Violation("target H idempotent", ())
    dist = check_distributive(B)
    if not dist.holds:
        return dist.counterexample
    return None
