"""Direct and wreath products, sequential composition, algebra expressions.

The wreath product ``A1 ∘ A2`` has horizontal part ``H1 × H2`` (pair
``(h1, h2)`` stored as ``h1 * |H2| + h2``) and vertical elements ``(v, f)``
with ``v ∈ V1`` and ``f : H1 → V2``, acting by
``(v, f)(h1, h2) = (v h1, f(h1) h2)``.  The first algebra is the left factor.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .algebra import (DEFAULT_LIMIT, ForestAlgebra, Homomorphism, SizeGuardExceeded,
                      eval_forest, from_transformations, generate_algebra, subforest_values,
                      trivial, u1, u2)
from .terms import EMPTY, Alphabet, Forest, Tree

__all__ = [
    "WreathVertical", "direct_product", "product_h_add", "wreath_action", "wreath_compose",
    "wreath_identity", "wreath_transformation", "decode_wreath_vertical", "wreath_generated",
    "full_wreath", "relabel", "SequentialComposition", "sequential_compose",
    "Atom", "Product", "Wreath", "parse_expression", "format_expression",
    "expression_h_add", "expression_h_size", "vertical_image", "random_vertical", "realize_expression",
    "ATOMS", "SizeGuardExceeded",
]


class WreathVertical(NamedTuple):
    left: int
    table: tuple   # indexed by H1, values in V2


def product_h_add(A1: ForestAlgebra, A2: ForestAlgebra) -> list:
    n2 = A2.n_h
    return [[A1.h_add[x1][y1] * n2 + A2.h_add[x2][y2]
             for y1 in range(A1.n_h) for y2 in range(n2)]
            for x1 in range(A1.n_h) for x2 in range(n2)]


def direct_product(A1: ForestAlgebra, A2: ForestAlgebra) -> ForestAlgebra:
    n2 = A2.n_h
    rows = []
    for v1 in range(A1.n_v):
        for v2 in range(A2.n_v):
            rows.append(tuple(A1.act[v1][h1] * n2 + A2.act[v2][h2]
                              for h1 in range(A1.n_h) for h2 in range(n2)))
    names = None
    if A1.h_names and A2.h_names:
        names = [f"({a},{b})" for a in A1.h_names for b in A2.h_names]
    return from_transformations(product_h_add(A1, A2), A1.zero * n2 + A2.zero, rows, h_names=names)


def wreath_action(A1: ForestAlgebra, A2: ForestAlgebra, w: WreathVertical, h: tuple) -> tuple:
    h1, h2 = h
    return A1.act[w.left][h1], A2.act[w.table[h1]][h2]


def wreath_compose(A1: ForestAlgebra, A2: ForestAlgebra, w: WreathVertical, w2: WreathVertical) -> WreathVertical:
    """``(v,f)(v',f') = (vv', h ↦ f(v'h) f'(h))``."""
    table = tuple(A2.v_mul[w.table[A1.act[w2.left][h]]][w2.table[h]] for h in range(A1.n_h))
    return WreathVertical(A1.v_mul[w.left][w2.left], table)


def wreath_identity(A1: ForestAlgebra, A2: ForestAlgebra) -> WreathVertical:
    return WreathVertical(A1.one, (A2.one,) * A1.n_h)


def wreath_transformation(A1: ForestAlgebra, A2: ForestAlgebra, w: WreathVertical) -> tuple:
    n2 = A2.n_h
    out = []
    for h1 in range(A1.n_h):
        left = A1.act[w.left][h1] * n2
        row = A2.act[w.table[h1]]
        out.extend(left + row[h2] for h2 in range(n2))
    return tuple(out)


def decode_wreath_vertical(A1: ForestAlgebra, A2: ForestAlgebra, image: Sequence[int]) -> WreathVertical:
    """Recover ``(v, f)`` from its action (both factors act faithfully)."""
    n2 = A2.n_h
    left = tuple(image[h1 * n2] // n2 for h1 in range(A1.n_h))
    table = tuple(A2.v_index[tuple(image[h1 * n2 + h2] % n2 for h2 in range(n2))]
                  for h1 in range(A1.n_h))
    return WreathVertical(A1.v_index[left], table)


def wreath_generated(A1: ForestAlgebra, A2: ForestAlgebra, generators: Sequence[WreathVertical] = (),
                     limit: int = DEFAULT_LIMIT):
    """Subalgebra of ``A1 ∘ A2`` generated by ``generators`` and all insertions.

    Returns ``(algebra, gen_index)``; vertical elements are decoded with
    :func:`decode_wreath_vertical`.
    """
    gens = [wreath_transformation(A1, A2, WreathVertical(*g)) for g in generators]
    return generate_algebra(product_h_add(A1, A2), A1.zero * A2.n_h + A2.zero, gens, limit)


def full_wreath(A1: ForestAlgebra, A2: ForestAlgebra, limit: int = DEFAULT_LIMIT) -> ForestAlgebra:
    """Every ``(v, f)``; distinct pairs act differently, so no collapse is needed."""
    size = A1.n_v * A2.n_v ** A1.n_h
    if size > limit:
        raise SizeGuardExceeded(f"full wreath product has {size} vertical elements (cap {limit})")
    rows = [wreath_transformation(A1, A2, WreathVertical(v, f))
            for v in range(A1.n_v) for f in itertools.product(range(A2.n_v), repeat=A1.n_h)]
    return from_transformations(product_h_add(A1, A2), A1.zero * A2.n_h + A2.zero, rows)


# --------------------------------------------------- sequential composition

def relabel(alpha: Homomorphism, forest: Forest) -> Forest:
    """``t^α``: each node ``a`` becomes ``(a, α(subforest below it))``."""
    sub, _ = subforest_values(alpha, forest)
    it = iter(sub)

    def walk(f):
        out = []
        for t in f:
            g = next(it)
            out.append(Tree((t.label, g), walk(t.children)))
        return tuple(out)

    return walk(forest)


@dataclass(frozen=True)
class SequentialComposition:
    """``α ⊗ β`` as letter-wise wreath verticals; materialize for a homomorphism."""
    alpha: Homomorphism
    beta: Homomorphism
    verticals: tuple

    @property
    def left(self) -> ForestAlgebra:
        return self.alpha.algebra

    @property
    def right(self) -> ForestAlgebra:
        return self.beta.algebra

    def materialize(self, limit: int = DEFAULT_LIMIT) -> Homomorphism:
        alg, gen_index = wreath_generated(self.left, self.right, self.verticals, limit)
        return Homomorphism(self.alpha.alphabet, alg, gen_index)

    def evaluate(self, forest: Forest) -> tuple:
        """Pair value of ``forest`` computed with :func:`wreath_action` only."""
        A1, A2 = self.left, self.right
        alphabet = self.alpha.alphabet

        def ev(f):
            h1, h2 = A1.zero, A2.zero
            for t in f:
                g1, g2 = wreath_action(A1, A2, self.verticals[alphabet.index(t.label)], ev(t.children))
                h1, h2 = A1.h_add[h1][g1], A2.h_add[h2][g2]
            return h1, h2

        return ev(forest)

    def split(self, value: int) -> tuple:
        return divmod(value, self.right.n_h)


def sequential_compose(alpha: Homomorphism, beta: Homomorphism) -> SequentialComposition:
    """Letter ``a`` ↦ ``(α(a□), g ↦ β((a, g)□))``."""
    expected = alpha.alphabet.product(range(alpha.algebra.n_h))
    if beta.alphabet != expected:
        raise ValueError("the second homomorphism must be over pairs (letter, H1 element)")
    verticals = tuple(
        WreathVertical(alpha.image(a), tuple(beta.image((a, g)) for g in range(alpha.algebra.n_h)))
        for a in alpha.alphabet)
    return SequentialComposition(alpha, beta, verticals)


# ---------------------------------------------------- algebra expressions

ATOMS = {"U1": u1, "U2": u2, "T": trivial}


@dataclass(frozen=True)
class Atom:
    name: str
    algebra: ForestAlgebra | None = None

    def resolve(self) -> ForestAlgebra:
        if self.algebra is not None:
            return self.algebra
        try:
            return ATOMS[self.name]()
        except KeyError:
            raise ValueError(f"unknown atom {self.name!r}") from None

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Product:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("empty product")

    def __str__(self):
        return "P(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Wreath:
    """Left-nested: ``W(e1, e2, e3)`` is ``(e1 ∘ e2) ∘ e3``."""
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("empty wreath product")

    def __str__(self):
        return "W(" + ",".join(map(str, self.parts)) + ")"


def format_expression(e) -> str:
    return str(e)


_EXPR_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*|[(),])")


def parse_expression(text: str):
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _EXPR_TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad expression at position {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    k = 0

    def node():
        nonlocal k
        tok = tokens[k]
        k += 1
        if tok in ("P", "W") and k < len(tokens) and tokens[k] == "(":
            k += 1
            parts = [node()]
            while tokens[k] == ",":
                k += 1
                parts.append(node())
            if tokens[k] != ")":
                raise ValueError("expected ')'")
            k += 1
            return Product(parts) if tok == "P" else Wreath(parts)
        if not tok[0].isalpha():
            raise ValueError(f"unexpected {tok!r}")
        return Atom(tok)

    try:
        e = node()
    except IndexError:
        raise ValueError("truncated expression") from None
    if k != len(tokens):
        raise ValueError("trailing input in expression")
    return e


def _binary(e):
    """Wreath lists folded to the left."""
    if isinstance(e, Wreath) and len(e.parts) > 1:
        return Wreath(e.parts[:-1]), e.parts[-1]
    return None


def expression_h_size(e) -> int:
    if isinstance(e, Atom):
        return e.resolve().n_h
    sizes = [expression_h_size(p) for p in e.parts]
    out = 1
    for s in sizes:
        out *= s
    return out


def expression_h_add(e):
    """``(h_add, zero)`` of the horizontal monoid of ``e`` (mixed radix, first part most significant)."""
    if isinstance(e, Atom):
        A = e.resolve()
        return [list(r) for r in A.h_add], A.zero
    add, zero = expression_h_add(e.parts[0])
    for part in e.parts[1:]:
        add2, zero2 = expression_h_add(part)
        n2 = len(add2)
        add = [[add[x1][y1] * n2 + add2[x2][y2] for y1 in range(len(add)) for y2 in range(n2)]
               for x1 in range(len(add)) for x2 in range(n2)]
        zero = zero * n2 + zero2
    return add, zero


def vertical_image(e, s) -> tuple:
    """Action on H(e) of a structured vertical element.

    Atom: an index into V.  Product: a tuple with one element per part.
    Wreath ``W(e1, …, en)``: ``(s_left, table)`` for the left fold, with
    ``table`` indexed by H of ``W(e1, …, e_{n-1})``.
    """
    if isinstance(e, Atom):
        return e.resolve().act[s]
    if isinstance(e, Product) or len(e.parts) == 1:
        if isinstance(e, Wreath):
            return vertical_image(e.parts[0], s)
        imgs = [vertical_image(p, x) for p, x in zip(e.parts, s)]
        out = imgs[0]
        for img in imgs[1:]:
            n2 = len(img)
            out = tuple(a * n2 + b for a in out for b in img)
        return out
    left_e, right_e = _binary(e)
    left_s, table = s
    left = vertical_image(left_e, left_s)
    cache = {}
    out = []
    for h1, x in enumerate(table):
        if x not in cache:
            cache[x] = vertical_image(right_e, x)
        img = cache[x]
        n2 = len(img)
        base = left[h1] * n2
        out.extend(base + y for y in img)
    return tuple(out)


def random_vertical(e, rng):
    if isinstance(e, Atom):
        return rng.randrange(e.resolve().n_v)
    if isinstance(e, Product):
        return tuple(random_vertical(p, rng) for p in e.parts)
    if len(e.parts) == 1:
        return random_vertical(e.parts[0], rng)
    left_e, right_e = _binary(e)
    return (random_vertical(left_e, rng),
            tuple(random_vertical(right_e, rng) for _ in range(expression_h_size(left_e))))


def _all_verticals(e):
    if isinstance(e, Atom):
        yield from range(e.resolve().n_v)
    elif isinstance(e, Product):
        yield from itertools.product(*[list(_all_verticals(p)) for p in e.parts])
    elif len(e.parts) == 1:
        yield from _all_verticals(e.parts[0])
    else:
        left_e, right_e = _binary(e)
        rights = list(_all_verticals(right_e))
        n1 = expression_h_size(left_e)
        for ls in _all_verticals(left_e):
            for table in itertools.product(rights, repeat=n1):
                yield ls, table


def _full_count(e) -> int:
    if isinstance(e, Atom):
        return e.resolve().n_v
    if isinstance(e, Product):
        out = 1
        for p in e.parts:
            out *= _full_count(p)
        return out
    if len(e.parts) == 1:
        return _full_count(e.parts[0])
    left_e, right_e = _binary(e)
    return _full_count(left_e) * _full_count(right_e) ** expression_h_size(left_e)


def realize_expression(e, generators=None, limit: int = DEFAULT_LIMIT):
    """Forest algebra realizing ``e``.

    Without ``generators`` every structured vertical element is included
    (the full product).  With ``generators`` (structured elements, see
    :func:`vertical_image`) the generated subalgebra is built and
    ``(algebra, gen_index)`` is returned.
    """
    add, zero = expression_h_add(e)
    if generators is None:
        if isinstance(e, Atom):
            return e.resolve()
        count = _full_count(e)
        if count > limit:
            raise SizeGuardExceeded(f"{e} has {count} vertical elements (cap {limit})")
        rows = {}
        for s in _all_verticals(e):
            rows.setdefault(vertical_image(e, s), None)
        return from_transformations(add, zero, list(rows))
    gens = [vertical_image(e, s) for s in generators]
    return generate_algebra(add, zero, gens, limit)
