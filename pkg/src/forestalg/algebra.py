"""Finite forest algebras, homomorphisms, recognizers and minimization.

Horizontal elements are ``range(n_h)`` with addition table ``h_add``;
vertical elements are ``range(n_v)`` with ``v_mul[v][w] = vw`` meaning
"apply ``w`` first".  ``act[v][h]`` is ``vh``.  ``ins_post[h]`` is the
context ``□+h`` (often written ``1+h``) and ``ins_pre[h]`` is ``h+□``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import terms
from ._backend import BACKEND, ClosureLimitExceeded, kernels
from .monoid import FiniteMonoid, Violation, validate_monoid
from .terms import HOLE, Alphabet, Forest, Tree

__all__ = [
    "ForestAlgebra", "Homomorphism", "Recognizer", "SyntacticResult", "Minimized", "SizeGuardExceeded",
    "validate_algebra", "from_transformations", "generate_algebra", "trivial", "u1", "u2",
    "eval_forest", "eval_context", "eval_multicontext", "subforest_values", "accepts",
    "reachable_subalgebra", "syntactic_algebra", "minimize_implicit", "find_isomorphism",
    "is_isomorphic", "DEFAULT_LIMIT",
]

DEFAULT_LIMIT = 20000


class SizeGuardExceeded(RuntimeError):
    """A construction would exceed the configured element cap."""


def _tuple2(rows) -> tuple:
    if isinstance(rows, np.ndarray):
        return tuple(map(tuple, rows.tolist()))
    return tuple(tuple(int(x) for x in row) for row in rows)


def _row_keys(rows: np.ndarray) -> np.ndarray:
    """Exact sortable keys for the rows of an integer matrix."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).reshape(-1)


class ForestAlgebra:
    """Finite forest algebra given by tables.

    V is stored through its action rows; since the action is faithful the
    multiplication table ``v_mul`` can be derived, which is done lazily when
    it is not supplied.
    """

    def __init__(self, h_add, zero: int, v_mul, one: int, act, ins_pre, ins_post,
                 h_names=None, v_names=None):
        self.h_add = _tuple2(h_add)
        self.zero = int(zero)
        self.one = int(one)
        self.act = _tuple2(act)
        self.ins_pre = tuple(int(x) for x in ins_pre)
        self.ins_post = tuple(int(x) for x in ins_post)
        self.h_names = None if h_names is None else tuple(map(str, h_names))
        self.v_names = None if v_names is None else tuple(map(str, v_names))
        n_h, n_v = len(self.h_add), len(self.act)
        if any(len(r) != n_h for r in self.act):
            raise ValueError("action table must be |V| x |H|")
        if len(self.ins_pre) != n_h or len(self.ins_post) != n_h:
            raise ValueError("insertion maps must be indexed by H")
        if v_mul is not None:
            v_mul = _tuple2(v_mul)
            if len(v_mul) != n_v:
                raise ValueError("multiplication table must be |V| x |V|")
            self.__dict__["v_mul"] = v_mul

    @cached_property
    def v_mul(self) -> tuple:
        rows = np.asarray(self.act, dtype=np.int64).reshape(len(self.act), self.n_h)
        keys = _row_keys(rows)
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        table = []
        for r in rows:
            comp = _row_keys(r[rows])
            pos = np.searchsorted(sorted_keys, comp)
            pos[pos == len(order)] = 0
            if not np.array_equal(sorted_keys[pos], comp):
                raise ValueError("vertical elements are not closed under composition")
            table.append(order[pos])
        return _tuple2(table)

    @property
    def n_h(self) -> int:
        return len(self.h_add)

    @property
    def n_v(self) -> int:
        return len(self.act)

    @cached_property
    def H(self) -> FiniteMonoid:
        return FiniteMonoid(self.h_add, self.zero, self.h_names)

    @cached_property
    def V(self) -> FiniteMonoid:
        return FiniteMonoid(self.v_mul, self.one, self.v_names)

    @cached_property
    def v_index(self) -> dict:
        """Vertical element by its action row."""
        return {row: v for v, row in enumerate(self.act)}

    @cached_property
    def kernel_tables(self):
        if BACKEND == "cython":
            return (np.ascontiguousarray(self.act, dtype=np.int32),
                    np.ascontiguousarray(self.h_add, dtype=np.int32))
        return self.act, self.h_add

    def add(self, g: int, h: int) -> int:
        return self.h_add[g][h]

    def mul(self, v: int, w: int) -> int:
        return self.v_mul[v][w]

    def apply(self, v: int, h: int) -> int:
        return self.act[v][h]

    def hsum(self, elements: Iterable[int]) -> int:
        out = self.zero
        for x in elements:
            out = self.h_add[out][x]
        return out

    def h_name(self, h: int) -> str:
        return self.h_names[h] if self.h_names else f"h{h}"

    def v_name(self, v: int) -> str:
        return self.v_names[v] if self.v_names else f"v{v}"

    def __repr__(self) -> str:
        return f"ForestAlgebra(|H|={self.n_h}, |V|={self.n_v})"

    def __eq__(self, other):
        if not isinstance(other, ForestAlgebra):
            return NotImplemented
        return (self.h_add, self.zero, self.v_mul, self.one, self.act, self.ins_pre, self.ins_post) == (
            other.h_add, other.zero, other.v_mul, other.one, other.act, other.ins_pre, other.ins_post)

    def __hash__(self):
        return hash((self.h_add, self.act))


def validate_algebra(A: ForestAlgebra) -> Violation | None:
    """First broken forest-algebra law, or ``None``."""
    bad = validate_monoid(A.H)
    if bad:
        return Violation("H " + bad.law, bad.witness)
    bad = validate_monoid(A.V)
    if bad:
        return Violation("V " + bad.law, bad.witness)
    act, mul, add = A.act, A.v_mul, A.h_add
    for h in range(A.n_h):
        if act[A.one][h] != h:
            return Violation("identity action", (h,))
    for v in range(A.n_v):
        for w in range(A.n_v):
            vw = mul[v][w]
            for h in range(A.n_h):
                if act[vw][h] != act[v][act[w][h]]:
                    return Violation("action law", (v, w, h))
    rows = {}
    for v, row in enumerate(act):
        if row in rows:
            return Violation("faithfulness", (rows[row], v))
        rows[row] = v
    for h in range(A.n_h):
        for g in range(A.n_h):
            if act[A.ins_post[h]][g] != add[g][h]:
                return Violation("insertion 1+h", (h, g))
            if act[A.ins_pre[h]][g] != add[h][g]:
                return Violation("insertion h+1", (h, g))
    return None


# ------------------------------------------------------------ constructors

def _insertions(h_add) -> tuple[list, list]:
    n = len(h_add)
    post = [tuple(h_add[g][h] for g in range(n)) for h in range(n)]
    pre = [tuple(h_add[h][g] for g in range(n)) for h in range(n)]
    return pre, post


def from_transformations(h_add, zero: int, rows: Sequence[Sequence[int]],
                         h_names=None, v_names=None) -> ForestAlgebra:
    """Algebra whose V is the given set of maps on H (closed under composition,
    containing the identity and every insertion)."""
    rows = [tuple(r) for r in rows]
    index = {}
    for v, r in enumerate(rows):
        if r in index:
            raise ValueError(f"duplicate transformation at {index[r]} and {v}")
        index[r] = v
    n = len(h_add)
    ident = tuple(range(n))
    if ident not in index:
        raise ValueError("identity map missing")
    pre, post = _insertions(h_add)
    try:
        ins_pre = [index[p] for p in pre]
        ins_post = [index[p] for p in post]
    except KeyError:
        raise ValueError("insertion map missing from V") from None
    # closure under composition is checked when the multiplication table is built
    return ForestAlgebra(h_add, zero, None, index[ident], rows, ins_pre, ins_post, h_names, v_names)


def generate_algebra(h_add, zero: int, gens: Sequence[Sequence[int]] = (), limit: int = DEFAULT_LIMIT,
                     h_names=None):
    """Algebra on H whose V is generated by ``gens``, the identity and all insertions.

    Returns ``(algebra, gen_index)`` with ``gen_index[i]`` the element of
    ``gens[i]``.  V is ordered with the identity first.
    """
    n = len(h_add)
    ident = tuple(range(n))
    pre, post = _insertions(h_add)
    seeds = [ident] + post + pre + [tuple(g) for g in gens]
    try:
        images, _ = kernels.monoid_closure(seeds, limit)
    except ClosureLimitExceeded:
        raise SizeGuardExceeded(f"vertical monoid exceeds {limit} elements") from None
    # the closure omits nothing but may not contain the identity as a product; it is a seed
    alg = from_transformations(h_add, zero, images, h_names=h_names)
    gen_index = [alg.v_index[tuple(g)] for g in gens]
    return alg, gen_index


def trivial() -> ForestAlgebra:
    return ForestAlgebra([[0]], 0, [[0]], 0, [[0]], [0], [0], ("0",), ("1",))


def u1() -> ForestAlgebra:
    """({0,∞},{1,c}) with c the constant-∞ map."""
    add = [[0, 1], [1, 1]]
    return ForestAlgebra(add, 0, [[0, 1], [1, 1]], 0, [[0, 1], [1, 1]], [0, 1], [0, 1],
                         ("0", "inf"), ("1", "c"))


def u2() -> ForestAlgebra:
    """({0,∞},{1,c0,c∞}) with the two constant maps."""
    add = [[0, 1], [1, 1]]
    mul = [[0, 1, 2], [1, 1, 1], [2, 2, 2]]
    act = [[0, 1], [0, 0], [1, 1]]
    return ForestAlgebra(add, 0, mul, 0, act, [0, 2], [0, 2], ("0", "inf"), ("1", "c0", "cinf"))


# --------------------------------------------------------- homomorphisms

@dataclass(frozen=True)
class Homomorphism:
    alphabet: Alphabet
    algebra: ForestAlgebra
    letter_image: tuple

    def __post_init__(self):
        img = self.letter_image
        if isinstance(img, Mapping):
            img = tuple(img[a] for a in self.alphabet)
        img = tuple(int(v) for v in img)
        if len(img) != len(self.alphabet):
            raise ValueError("one image per letter required")
        if any(not 0 <= v < self.algebra.n_v for v in img):
            raise ValueError("letter image outside V")
        object.__setattr__(self, "letter_image", img)

    def image(self, symbol) -> int:
        return self.letter_image[self.alphabet.index(symbol)]


@dataclass(frozen=True)
class Recognizer:
    hom: Homomorphism
    accepting: frozenset

    def __post_init__(self):
        acc = frozenset(int(h) for h in self.accepting)
        if any(not 0 <= h < self.algebra.n_h for h in acc):
            raise ValueError("accepting set outside H")
        object.__setattr__(self, "accepting", acc)

    @property
    def algebra(self) -> ForestAlgebra:
        return self.hom.algebra

    @property
    def alphabet(self) -> Alphabet:
        return self.hom.alphabet

    def __call__(self, forest: Forest) -> bool:
        return accepts(self, forest)


def _flatten(hom: Homomorphism, forest: Forest):
    images, parents = [], []
    alphabet = hom.alphabet
    letter = hom.letter_image
    stack = [(t, -1) for t in reversed(forest)]
    while stack:
        t, p = stack.pop()
        if t.label == HOLE:
            raise ValueError("forest contains a hole")
        me = len(images)
        images.append(letter[alphabet.index(t.label)])
        parents.append(p)
        stack.extend((c, me) for c in reversed(t.children))
    return images, parents


def subforest_values(hom: Homomorphism, forest: Forest):
    """Preorder list of the values of the subforest below each node, and the total."""
    images, parents = _flatten(hom, forest)
    A = hom.algebra
    if not images:
        return [], A.zero
    act, add = A.kernel_tables
    sub, total = kernels.eval_flat(images, parents, act, add, A.zero)
    return [int(x) for x in sub], int(total)


def eval_forest(hom: Homomorphism, forest: Forest) -> int:
    A = hom.algebra
    if not forest:
        return A.zero
    images, parents = _flatten(hom, forest)
    act, add = A.kernel_tables
    return int(kernels.eval_flat(images, parents, act, add, A.zero)[1])


def eval_context(hom: Homomorphism, p: Forest) -> int:
    """Vertical value of a one-hole context."""
    if terms.hole_count(p) != 1:
        raise ValueError("not a context: expected exactly one hole")
    A = hom.algebra
    out = A.one
    forest = p
    while True:
        pos = next(i for i, t in enumerate(forest) if terms.hole_count((t,)))
        s = eval_forest(hom, forest[:pos])
        t = eval_forest(hom, forest[pos + 1:])
        out = A.v_mul[out][A.v_mul[A.ins_pre[s]][A.ins_post[t]]]
        tree = forest[pos]
        if tree.label == HOLE:
            return out
        out = A.v_mul[out][hom.image(tree.label)]
        forest = tree.children


def eval_multicontext(hom: Homomorphism, p: Forest, values: Sequence[int]) -> int:
    """Value of ``p`` with hole ``i`` (preorder) holding ``values[i]``."""
    values = list(values)
    if len(values) != terms.hole_count(p):
        raise ValueError(f"multicontext has {terms.hole_count(p)} holes, got {len(values)} values")
    A = hom.algebra
    it = iter(values)

    def ev(forest):
        out = A.zero
        for t in forest:
            if t.label == HOLE:
                val = next(it)
            else:
                val = A.act[hom.image(t.label)][ev(t.children)]
            out = A.h_add[out][val]
        return out

    return ev(p)


def enumerate_values(hom: Homomorphism, max_nodes: int):
    """``(forest, value)`` for every forest of :func:`terms.enumerate_forests`, same order.

    Values are built alongside the forests, one ``act`` and one ``add`` per
    new tree or forest, which makes exhaustive checks cheap.
    """
    A = hom.algebra
    act, add = A.act, A.h_add
    letters = [(a, act[hom.image(a)]) for a in hom.alphabet]
    forests: list[list] = [[((), A.zero)]]
    trees: list[list] = [[]]
    yield (), A.zero
    for n in range(1, max_nodes + 1):
        trees.append([(Tree(a, f), row[fv]) for a, row in letters for f, fv in forests[n - 1]])
        level = []
        for k in range(1, n + 1):
            for t, tv in trees[k]:
                row = add[tv]
                for rest, rv in forests[n - k]:
                    level.append(((t,) + rest, row[rv]))
        forests.append(level)
        yield from level


def accepts(r: Recognizer, forest: Forest) -> bool:
    return eval_forest(r.hom, forest) in r.accepting


# ------------------------------------------------------------ minimization

def _reachable_h(A: ForestAlgebra, letters: Sequence[int]) -> list[int]:
    order = [A.zero]
    seen = {A.zero}
    k = 0
    while k < len(order):
        x = order[k]
        new = [A.act[v][x] for v in letters]
        for y in order[: k + 1]:
            new.append(A.h_add[x][y])
            new.append(A.h_add[y][x])
        for z in new:
            if z not in seen:
                seen.add(z)
                order.append(z)
        k += 1
    return order


def reachable_subalgebra(r: Recognizer, limit: int = DEFAULT_LIMIT):
    """Restriction to the values of actual forests.

    Returns ``(recognizer, h_embed)`` where ``h_embed[i]`` is the original
    index of the new horizontal element ``i``.
    """
    A = r.algebra
    reach = _reachable_h(A, r.hom.letter_image)
    pos = {h: i for i, h in enumerate(reach)}
    h_add = [[pos[A.h_add[x][y]] for y in reach] for x in reach]
    gens = [tuple(pos[A.act[v][x]] for x in reach) for v in r.hom.letter_image]
    names = [A.h_name(h) for h in reach] if A.h_names else None
    B, gen_index = generate_algebra(h_add, 0, gens, limit, h_names=names)
    hom = Homomorphism(r.alphabet, B, gen_index)
    acc = frozenset(pos[h] for h in r.accepting if h in pos)
    return Recognizer(hom, acc), reach


class SyntacticResult(NamedTuple):
    algebra: ForestAlgebra
    hom: Homomorphism
    accepting: frozenset
    h_map: tuple     # source H element -> class, or -1 if not reachable
    v_map: tuple     # source V element -> class, or -1 if it does not act on reachable classes

    @property
    def recognizer(self) -> Recognizer:
        return Recognizer(self.hom, self.accepting)


def _refine(blocks: np.ndarray, add: np.ndarray, letters: np.ndarray) -> np.ndarray:
    """Coarsest refinement of ``blocks`` stable under g↦x+g, g↦g+x and the letters."""
    n = len(blocks)
    count = len(np.unique(blocks))
    while True:
        parts = [blocks[:, None], blocks[add], blocks[add.T]]
        if letters.size:
            parts.append(blocks[letters].T)
        sig = np.concatenate(parts, axis=1)
        _, first, inverse = np.unique(sig, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        # renumber classes by first occurrence so the zero state keeps class 0
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        new = rank[inverse]
        if len(first) == count:
            return new
        blocks, count = new, len(first)
        if count == n:
            return new


def minimize_implicit(alphabet: Alphabet, zero: Hashable, add: Callable, act: Callable,
                      accept: Callable, limit: int = DEFAULT_LIMIT):
    """Syntactic algebra of a language given by an implicit recognizer.

    ``add(x, y)`` and ``act(letter, x)`` operate on hashable states reachable
    from ``zero``; ``accept(x)`` decides membership.  States are explored
    breadth first, so ``states[0]`` is ``zero`` and maps to class 0.
    """
    letters = list(alphabet)
    states = [zero]
    index = {zero: 0}
    act_rows: list[list[int]] = []

    def push(s):
        if s not in index:
            if len(states) >= limit:
                raise SizeGuardExceeded(f"more than {limit} reachable forest values")
            index[s] = len(states)
            states.append(s)
        return index[s]

    pairs: dict = {}
    k = 0
    while k < len(states):
        x = states[k]
        act_rows.append([push(act(a, x)) for a in letters])
        for j in range(k + 1):
            y = states[j]
            pairs[(k, j)] = push(add(x, y))
            pairs[(j, k)] = push(add(y, x))
        k += 1
    n = len(states)
    add_t = np.empty((n, n), dtype=np.int64)
    for (i, j), z in pairs.items():
        add_t[i, j] = z
    letters_t = np.array(act_rows, dtype=np.int64).reshape(n, len(letters)).T.copy()
    initial = np.array([1 if accept(s) else 0 for s in states], dtype=np.int64)
    # class numbering by first occurrence; keeps zero in class 0
    _, first, inv = np.unique(initial, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    blocks = _refine(rank[inv.reshape(-1)], add_t, letters_t)
    return _quotient(alphabet, states, blocks, add_t, letters_t, accept, limit)


class Minimized(NamedTuple):
    hom: Homomorphism
    accepting: frozenset
    states: list       # explored states, in exploration order
    classes: list      # class of each explored state

    @property
    def recognizer(self) -> Recognizer:
        return Recognizer(self.hom, self.accepting)


def _quotient(alphabet, states, blocks, add_t, letters_t, accept, limit):
    m = int(blocks.max()) + 1
    rep = np.zeros(m, dtype=np.int64)
    seen = np.zeros(m, dtype=bool)
    for i, b in enumerate(blocks):
        if not seen[b]:
            seen[b] = True
            rep[b] = i
    h_add = blocks[add_t[np.ix_(rep, rep)]].tolist()
    gens = [tuple(blocks[row[rep]].tolist()) for row in letters_t]
    alg, gen_index = generate_algebra(h_add, int(blocks[0]), gens, limit)
    hom = Homomorphism(alphabet, alg, gen_index)
    accepting = frozenset(int(blocks[i]) for i in rep.tolist() if accept(states[i]))
    return Minimized(hom, accepting, states, [int(b) for b in blocks])


def syntactic_algebra(r: Recognizer, limit: int = DEFAULT_LIMIT) -> SyntacticResult:
    """Minimal recognizer of the language of ``r``, with projection maps."""
    A = r.algebra
    letters = dict(zip(r.alphabet, r.hom.letter_image))
    hom, accepting, reach, classes = minimize_implicit(
        r.alphabet, A.zero, lambda x, y: A.h_add[x][y], lambda a, x: A.act[letters[a]][x],
        lambda x: x in r.accepting, limit)
    h_map = [-1] * A.n_h
    for h, c in zip(reach, classes):
        h_map[h] = c
    B = hom.algebra
    v_map = []
    for v in range(A.n_v):
        row = [-1] * B.n_h
        ok = True
        for h in reach:
            c, d = h_map[h], h_map[A.act[v][h]]
            if d == -1 or (row[c] != -1 and row[c] != d):
                ok = False
                break
            row[c] = d
        v_map.append(B.v_index.get(tuple(row), -1) if ok else -1)
    return SyntacticResult(B, hom, accepting, tuple(h_map), tuple(v_map))


# ------------------------------------------------------------ isomorphism

def find_isomorphism(A: ForestAlgebra, B: ForestAlgebra):
    """``(h_perm, v_perm)`` with ``h_perm[h]`` in B for h in A, or ``None``."""
    if A.n_h != B.n_h or A.n_v != B.n_v:
        return None
    n = A.n_h
    rows_b = B.v_index

    def extend(assign, used):
        if len(assign) == n:
            v_perm = []
            for row in A.act:
                target = [0] * n
                for h, img in enumerate(row):
                    target[assign[h]] = assign[img]
                v = rows_b.get(tuple(target))
                if v is None:
                    return None
                v_perm.append(v)
            return list(assign), v_perm
        x = len(assign)
        for y in range(n):
            if y in used:
                continue
            if (x == A.zero) != (y == B.zero):
                continue
            assign.append(y)
            ok = True
            for z in range(x + 1):
                xz, zx = A.h_add[x][z], A.h_add[z][x]
                if (xz <= x and B.h_add[assign[x]][assign[z]] != assign[xz]) or \
                        (zx <= x and B.h_add[assign[z]][assign[x]] != assign[zx]):
                    ok = False
                    break
            if ok:
                found = extend(assign, used | {y})
                if found:
                    return found
            assign.pop()
        return None

    return extend([], frozenset())


def is_isomorphic(A: ForestAlgebra, B: ForestAlgebra) -> bool:
    return find_isomorphism(A, B) is not None
