"""Forests, contexts and multicontexts over a finite alphabet.

A forest is a tuple of :class:`Tree` values; the empty tuple is the empty
forest ``0``.  Holes are leaves whose label is :data:`HOLE`.  A context is a
forest with exactly one hole, a multicontext one with any number of holes.
Holes are indexed in preorder.

Text grammar::

    forest := <empty> | tree ('+' tree)*
    tree   := symbol | symbol '(' forest ')' | '_'
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "HOLE", "HOLE_TREE", "EMPTY", "Tree", "Forest", "Alphabet", "ForestSyntaxError",
    "UnknownSymbolError", "format_tree", "format_forest", "parse_forest", "parse_tree",
    "node_count", "hole_count", "labels", "check_alphabet", "is_context",
    "node_addresses", "subtree_at", "fill_multicontext", "substitute_all",
    "apply_context", "compose_contexts", "uniform_multicontext", "path_multiset",
    "maximal_path_words", "canonicalize", "enumerate_forests", "merge_same_root",
    "path_normal_form",
]

HOLE = "_"
SYMBOL_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")


class Tree(NamedTuple):
    label: Hashable
    children: tuple = ()

    def __str__(self) -> str:
        return format_tree(self)


Forest = tuple  # tuple[Tree, ...]
EMPTY: Forest = ()
HOLE_TREE = Tree(HOLE, ())


class ForestSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownSymbolError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet has duplicate symbols")
        if HOLE in symbols:
            raise ValueError("the hole marker is not a symbol")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    def __iter__(self) -> Iterator:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbolError(f"unknown symbol {symbol!r}") from None

    def product(self, other: Iterable) -> "Alphabet":
        """The alphabet of pairs ``(a, b)``, ``a`` varying slowest."""
        return Alphabet(tuple((a, b) for a in self.symbols for b in other))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.symbols)) + "}"


# ---------------------------------------------------------------- printing

def _format_label(label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(map(str, label)) + ")"
    return str(label)


def format_tree(tree: Tree) -> str:
    head = _format_label(tree.label)
    if tree.children:
        return f"{head}({format_forest(tree.children)})"
    return head


def format_forest(forest: Forest) -> str:
    """Canonical text of a forest; the empty forest prints as ``0``."""
    if not forest:
        return "0"
    return "+".join(format_tree(t) for t in forest)


print_forest = format_forest


# ----------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z][A-Za-z0-9]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(1) if m.group(1) else m.start(2)
        tokens.append((m.group(1) or m.group(2), start))
        pos = m.end()
    return tokens


def parse_forest(text: str, alphabet: Alphabet | None = None) -> Forest:
    """Parse ``text``; a lone ``0`` also denotes the empty forest."""
    tokens = _tokenize(text)
    if [t for t, _ in tokens] == ["0"]:
        return EMPTY
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def where():
        return tokens[pos][1] if pos < len(tokens) else len(text)

    def forest():
        nonlocal pos
        if peek() in (None, ")"):
            return EMPTY
        trees = [tree()]
        while peek() == "+":
            pos += 1
            trees.append(tree())
        return tuple(trees)

    def tree():
        nonlocal pos
        tok = peek()
        if tok == HOLE:
            pos += 1
            return HOLE_TREE
        if tok is None or not SYMBOL_RE.match(tok):
            raise ForestSyntaxError(f"expected symbol, got {tok!r}", where())
        if alphabet is not None and tok not in alphabet:
            raise UnknownSymbolError(f"unknown symbol {tok!r} at position {where()}")
        pos += 1
        if peek() == "(":
            pos += 1
            children = forest()
            if peek() == "0" and not children:
                pos += 1
            if peek() != ")":
                raise ForestSyntaxError("expected ')'", where())
            pos += 1
            return Tree(tok, children)
        return Tree(tok, EMPTY)

    result = forest()
    if pos != len(tokens):
        raise ForestSyntaxError(f"unexpected {peek()!r}", where())
    return result


def parse_tree(text: str, alphabet: Alphabet | None = None) -> Tree:
    forest = parse_forest(text, alphabet)
    if len(forest) != 1:
        raise ValueError(f"expected a single tree, got {len(forest)} roots")
    return forest[0]


# --------------------------------------------------------------- structure

def node_count(forest: Forest, holes: bool = False) -> int:
    """Number of nodes; holes are excluded unless ``holes`` is set."""
    total = 0
    stack = list(forest)
    while stack:
        t = stack.pop()
        if t.label == HOLE:
            total += holes
            continue
        total += 1
        stack.extend(t.children)
    return total


def hole_count(forest: Forest) -> int:
    count = 0
    stack = list(forest)
    while stack:
        t = stack.pop()
        if t.label == HOLE:
            count += 1
        else:
            stack.extend(t.children)
    return count


def labels(forest: Forest) -> set:
    out = set()
    stack = list(forest)
    while stack:
        t = stack.pop()
        if t.label != HOLE:
            out.add(t.label)
            stack.extend(t.children)
    return out


def check_alphabet(forest: Forest, alphabet: Alphabet) -> None:
    for symbol in labels(forest):
        if symbol not in alphabet:
            raise UnknownSymbolError(f"unknown symbol {symbol!r}")


def is_context(forest: Forest) -> bool:
    return hole_count(forest) == 1


def node_addresses(forest: Forest) -> list[tuple]:
    """Preorder list of node addresses; an address is a path of child indices."""
    out = []

    def walk(f, prefix):
        for i, t in enumerate(f):
            addr = prefix + (i,)
            out.append(addr)
            walk(t.children, addr)

    walk(forest, ())
    return out


def subtree_at(forest: Forest, address: Sequence[int]) -> Tree:
    if not address:
        raise ValueError("empty address")
    node = forest[address[0]]
    for i in address[1:]:
        node = node.children[i]
    return node


# ------------------------------------------------------------ substitution

def fill_multicontext(p: Forest, values: Sequence[Forest]) -> Forest:
    """Replace hole ``i`` (preorder) by ``values[i]``."""
    values = list(values)
    if len(values) != hole_count(p):
        raise ValueError(f"multicontext has {hole_count(p)} holes, got {len(values)} values")
    it = iter(values)

    def fill(f):
        out = []
        for t in f:
            if t.label == HOLE:
                out.extend(next(it))
            else:
                out.append(Tree(t.label, fill(t.children)))
        return tuple(out)

    return fill(p)


def substitute_all(p: Forest, value: Forest) -> Forest:
    """Put the same forest (or multicontext) into every hole of ``p``."""

    def fill(f):
        out = []
        for t in f:
            if t.label == HOLE:
                out.extend(value)
            else:
                out.append(Tree(t.label, fill(t.children)))
        return tuple(out)

    return fill(p)


def apply_context(p: Forest, s: Forest) -> Forest:
    if hole_count(p) != 1:
        raise ValueError("not a context: expected exactly one hole")
    return substitute_all(p, s)


def compose_contexts(p: Forest, q: Forest) -> Forest:
    if hole_count(p) != 1 or hole_count(q) != 1:
        raise ValueError("not a context: expected exactly one hole")
    return substitute_all(p, q)


def uniform_multicontext(levels: Sequence[tuple], roots: int = 1) -> Forest:
    """Uniform multicontext: ``levels`` lists ``(symbol, arity)`` top-down,
    ``arity`` being the number of children of each node on that level; the
    children of the last level are holes.  ``roots`` copies of the top tree
    are placed side by side."""
    if not levels:
        raise ValueError("empty level list")
    if roots < 1 or any(arity < 1 for _, arity in levels):
        raise ValueError("arities must be positive")
    below: Forest = (HOLE_TREE,)
    for symbol, arity in reversed(levels):
        below = (Tree(symbol, below * arity),)
    return below * roots


# ------------------------------------------------------------------- paths

def path_multiset(forest: Forest) -> Counter:
    """One root-to-node label word per node."""
    out: Counter = Counter()
    stack = [(t, ()) for t in forest]
    while stack:
        t, prefix = stack.pop()
        if t.label == HOLE:
            continue
        word = prefix + (t.label,)
        out[word] += 1
        stack.extend((c, word) for c in t.children)
    return out


def maximal_path_words(forest: Forest) -> Counter:
    """One root-to-leaf label word per leaf."""
    out: Counter = Counter()
    stack = [(t, ()) for t in forest]
    while stack:
        t, prefix = stack.pop()
        word = prefix + (t.label,)
        if t.children:
            stack.extend((c, word) for c in t.children)
        else:
            out[word] += 1
    return out


# --------------------------------------------------------- canonical order

def _key(tree: Tree):
    return (_format_label(tree.label), tuple(_key(c) for c in tree.children))


def canonicalize(forest: Forest) -> Forest:
    """Sort siblings recursively; equal results mean equal up to sibling order."""
    trees = [Tree(t.label, canonicalize(t.children)) for t in forest]
    trees.sort(key=_key)
    return tuple(trees)


# ------------------------------------------------------------- enumeration

def enumerate_forests(alphabet: Alphabet, max_nodes: int, unordered: bool = False) -> Iterator[Forest]:
    """Every forest with at most ``max_nodes`` nodes, each exactly once.

    Output is ordered by node count.  With ``unordered`` only one forest per
    sibling-permutation class is produced (the one whose trees appear in
    generation order), which is exhaustive for languages closed under
    reordering siblings.  Subtrees are shared between results.
    """
    if max_nodes < 0:
        return
    symbols = list(alphabet)
    if unordered:
        yield from _enumerate_unordered(symbols, max_nodes)
        return
    forests: list[list[Forest]] = [[EMPTY]]
    trees: list[list[Tree]] = [[]]
    yield EMPTY
    for n in range(1, max_nodes + 1):
        trees.append([Tree(a, f) for a in symbols for f in forests[n - 1]])
        level = []
        for k in range(1, n + 1):
            for t in trees[k]:
                for rest in forests[n - k]:
                    level.append((t,) + rest)
        forests.append(level)
        yield from level


def _enumerate_unordered(symbols, max_nodes):
    # tree ids are assigned in generation order; a forest lists its trees
    # with non-decreasing ids
    trees: list[Tree] = []
    by_size: dict[int, list[int]] = {}
    memo: dict[tuple, list[Forest]] = {}

    def forests(n, min_id):
        key = (n, min_id)
        if key in memo:
            return memo[key]
        if n == 0:
            out = [EMPTY]
        else:
            out = []
            for size in range(1, n + 1):
                for tid in by_size.get(size, ()):
                    if tid < min_id:
                        continue
                    for rest in forests(n - size, tid):
                        out.append((trees[tid],) + rest)
        memo[key] = out
        return out

    yield EMPTY
    for n in range(1, max_nodes + 1):
        by_size[n] = []
        # trees of size n need all forests of size n-1, which only use smaller trees
        for a in symbols:
            for f in forests(n - 1, 0):
                by_size[n].append(len(trees))
                trees.append(Tree(a, f))
        yield from forests(n, 0)


def merge_same_root(forest: Forest, label) -> Forest:
    """One rewrite step ``a t1 + … + a tn`` → ``a(t1+…+tn) + a + … + a``.

    The merged tree takes the place of the first ``label`` root; the
    ``n-1`` bare leaves are appended.  The multiset of paths is unchanged.
    """
    roots = [t for t in forest if t.label == label]
    if len(roots) < 2:
        return forest
    merged = Tree(label, tuple(c for t in roots for c in t.children))
    out, placed = [], False
    for t in forest:
        if t.label == label:
            if not placed:
                out.append(merged)
                placed = True
        else:
            out.append(t)
    return tuple(out) + (Tree(label, EMPTY),) * (len(roots) - 1)


def path_normal_form(forest: Forest) -> Forest:
    """Normal form determined by the multiset of root paths alone."""
    out = []
    for label in sorted({t.label for t in forest}, key=_format_label):
        group = [t for t in forest if t.label == label]
        below = tuple(c for t in group for c in t.children)
        out.append(Tree(label, path_normal_form(below)))
        out.extend([Tree(label, EMPTY)] * (len(group) - 1))
    return canonicalize(tuple(out))
