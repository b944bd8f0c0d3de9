"""Finite monoids as tables, transformation closures, aperiodicity and ω."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ._backend import ADD, COMPOSE, GEN, MULT, ClosureLimitExceeded, kernels

__all__ = [
    "FiniteMonoid", "Violation", "NotACongruence", "validate_monoid", "is_aperiodic",
    "omega_power", "additive_omega_multiple", "power_cycle", "transformation_cycle",
    "Gen", "Compose", "PointwiseAdd", "SelfAdd", "Transformation",
    "closure_transformations", "evaluate_provenance", "quotient_monoid",
    "cyclic_group", "saturating_counter", "ClosureLimitExceeded",
]


@dataclass(frozen=True)
class FiniteMonoid:
    """Monoid on ``range(size)``; ``table[x][y]`` is the product ``xy``."""
    table: tuple
    identity: int = 0
    names: tuple | None = None

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if any(len(row) != len(table) for row in table):
            raise ValueError("operation table must be square")
        if not 0 <= self.identity < len(table):
            raise ValueError("identity out of range")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def size(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def op(self, x: int, y: int) -> int:
        return self.table[x][y]

    def power(self, x: int, k: int) -> int:
        out = self.identity
        for _ in range(k):
            out = self.table[out][x]
        return out

    def name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)

    def is_commutative(self) -> bool:
        t = self.table
        n = len(t)
        return all(t[x][y] == t[y][x] for x in range(n) for y in range(x + 1, n))

    def is_idempotent(self) -> bool:
        return all(self.table[x][x] == x for x in range(self.size))

    def idempotents(self) -> list[int]:
        return [x for x in range(self.size) if self.table[x][x] == x]


@dataclass(frozen=True)
class Violation:
    """A failed law together with the elements that break it."""
    law: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.law} fails at {self.witness}"


class NotACongruence(ValueError):
    def __init__(self, witness):
        super().__init__(f"partition is not a congruence: {witness}")
        self.witness = witness


def validate_monoid(m: FiniteMonoid) -> Violation | None:
    t, e, n = m.table, m.identity, m.size
    for x in range(n):
        if t[e][x] != x or t[x][e] != x:
            return Violation("identity", (x,))
    for x in range(n):
        for y in range(n):
            xy = t[x][y]
            for z in range(n):
                if t[xy][z] != t[x][t[y][z]]:
                    return Violation("associativity", (x, y, z))
    return None


def power_cycle(m: FiniteMonoid, x: int) -> tuple[int, int]:
    """``(index, period)`` of the sequence x, x², x³, …"""
    seen = {}
    cur, k = x, 1
    while cur not in seen:
        seen[cur] = k
        cur = m.table[cur][x]
        k += 1
    return seen[cur], k - seen[cur]


def is_aperiodic(m: FiniteMonoid) -> bool:
    return all(power_cycle(m, x)[1] == 1 for x in range(m.size))


def omega_power(m: FiniteMonoid, x: int) -> int:
    """The unique idempotent among the positive powers of ``x``."""
    index, period = power_cycle(m, x)
    # x^k is idempotent for the unique k in [index, index+period) divisible by period
    k = index + (-index) % period
    return m.power(x, k)


def additive_omega_multiple(h: FiniteMonoid, x: int) -> int:
    """ω·x for a commutative aperiodic (additively written) monoid."""
    if not h.is_commutative():
        raise ValueError("horizontal monoid is not commutative")
    if not is_aperiodic(h):
        raise ValueError("horizontal monoid is not aperiodic")
    return omega_power(h, x)


def transformation_cycle(image: Sequence[int]) -> tuple[int, int]:
    """``(index, period)`` of the powers of a transformation under composition."""
    image = tuple(image)
    seen = {}
    cur, k = image, 1
    while cur not in seen:
        seen[cur] = k
        cur = tuple(image[c] for c in cur)
        k += 1
    return seen[cur], k - seen[cur]


# ------------------------------------------------------------- provenance

@dataclass(frozen=True)
class Gen:
    name: str

    def __str__(self):
        return self.name

    @property
    def depth(self):
        return 0


@dataclass(frozen=True)
class Compose:
    """``outer ∘ inner``; ``inner`` acts first."""
    outer: object
    inner: object

    def __str__(self):
        return f"({self.outer} . {self.inner})"

    @property
    def depth(self):
        return 1 + max(self.outer.depth, self.inner.depth)


@dataclass(frozen=True)
class PointwiseAdd:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} + {self.right})"

    @property
    def depth(self):
        return 1 + max(self.left.depth, self.right.depth)


@dataclass(frozen=True)
class SelfAdd:
    times: int
    arg: object

    def __str__(self):
        return f"{self.times}*{self.arg}"

    @property
    def depth(self):
        return 1 + self.arg.depth


@dataclass(frozen=True)
class Transformation:
    image: tuple
    provenance: object = field(compare=False)

    def __call__(self, x: int) -> int:
        return self.image[x]


def evaluate_provenance(expr, generators: dict, add=None) -> tuple:
    """Recompute an image from its provenance expression."""
    if isinstance(expr, Gen):
        return tuple(generators[expr.name])
    if isinstance(expr, Compose):
        outer = evaluate_provenance(expr.outer, generators, add)
        inner = evaluate_provenance(expr.inner, generators, add)
        return tuple(outer[e] for e in inner)
    if isinstance(expr, PointwiseAdd):
        left = evaluate_provenance(expr.left, generators, add)
        right = evaluate_provenance(expr.right, generators, add)
        return tuple(add[a][b] for a, b in zip(left, right))
    if isinstance(expr, SelfAdd):
        arg = evaluate_provenance(expr.arg, generators, add)
        cur = arg
        for _ in range(expr.times - 1):
            cur = tuple(add[c][a] for c, a in zip(cur, arg))
        return cur
    raise TypeError(f"not a provenance expression: {expr!r}")


_OPS = {"compose", "add", "multiple"}


def closure_transformations(carrier_size: int, generators, ops: Iterable[str] = ("compose",),
                            add=None, limit: int = 20000) -> list[Transformation]:
    """Least set of maps on ``range(carrier_size)`` containing the generators
    and closed under ``ops`` (a subset of ``compose``, ``add`` for pointwise
    addition, ``multiple`` for m-fold self-addition).

    ``generators`` is a mapping or a sequence of ``(name, image)`` pairs.
    Elements are returned in breadth-first order, so every provenance
    expression has minimal depth.
    """
    ops = set(ops)
    if not ops <= _OPS:
        raise ValueError(f"unknown operations {ops - _OPS}")
    items = list(generators.items()) if isinstance(generators, dict) else list(generators)
    for name, img in items:
        if len(img) != carrier_size or any(not 0 <= x < carrier_size for x in img):
            raise ValueError(f"generator {name} is not a map on the carrier")
    if not items:
        return []
    add_table = None if add is None else [list(r) for r in add]
    images, parents = kernels.closure(
        [img for _, img in items], add_table,
        compose="compose" in ops, pointwise_add="add" in ops,
        multiples="multiple" in ops, limit=limit)
    exprs: list = []
    for op, a, b in parents:
        if op == GEN:
            exprs.append(Gen(items[a][0]))
        elif op == COMPOSE:
            exprs.append(Compose(exprs[a], exprs[b]))
        elif op == ADD:
            exprs.append(PointwiseAdd(exprs[a], exprs[b]))
        elif op == MULT:
            exprs.append(SelfAdd(a, exprs[b]))
    return [Transformation(tuple(img), e) for img, e in zip(images, exprs)]


def quotient_monoid(m: FiniteMonoid, partition: Sequence[Iterable[int]]):
    """Quotient by a congruence given as blocks; returns ``(monoid, projection)``."""
    blocks = [sorted(b) for b in partition]
    proj = [-1] * m.size
    for i, block in enumerate(blocks):
        for x in block:
            if proj[x] != -1:
                raise ValueError(f"element {x} lies in two blocks")
            proj[x] = i
    if -1 in proj:
        raise ValueError(f"element {proj.index(-1)} is in no block")
    t = m.table
    for block in blocks:
        rep = block[0]
        for x in block[1:]:
            for y in range(m.size):
                if proj[t[x][y]] != proj[t[rep][y]]:
                    raise NotACongruence((rep, x, "right", y))
                if proj[t[y][x]] != proj[t[y][rep]]:
                    raise NotACongruence((rep, x, "left", y))
    table = [[proj[t[b1[0]][b2[0]]] for b2 in blocks] for b1 in blocks]
    return FiniteMonoid(table, proj[m.identity]), proj


def cyclic_group(n: int) -> FiniteMonoid:
    return FiniteMonoid([[(x + y) % n for y in range(n)] for x in range(n)], 0)


def saturating_counter(cap: int) -> FiniteMonoid:
    """Addition on ``{0, …, cap}`` truncated at ``cap``."""
    return FiniteMonoid([[min(cap, x + y) for y in range(cap + 1)] for x in range(cap + 1)], 0)
