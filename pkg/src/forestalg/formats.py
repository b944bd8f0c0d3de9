"""Text format for algebras and recognizers.

::

    forestalg-format 1
    algebra
    H 2
    h-names 0 inf
    zero 0
    add
    0 1
    1 1
    V 2
    v-names 1 c
    one 0
    mul
    0 1
    1 1
    act
    0 1
    1 1
    ins-pre 0 1
    ins-post 0 1
    letters a=1 b=0
    accepting 1
    end

``h-names``, ``v-names``, ``mul``, ``letters`` and ``accepting`` are
optional; a missing ``mul`` is derived from ``act``.  Lines starting with
``#`` are comments.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import ForestAlgebra, Homomorphism, Recognizer, validate_algebra
from .terms import SYMBOL_RE, Alphabet

__all__ = ["FormatError", "AlgebraDocument", "format_algebra", "parse_algebra",
           "read_algebra", "write_algebra", "HEADER"]

HEADER = "forestalg-format 1"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class AlgebraDocument:
    algebra: ForestAlgebra
    letters: dict | None = None        # symbol -> vertical element
    accepting: frozenset | None = None

    def hom(self) -> Homomorphism:
        if not self.letters:
            raise FormatError("the algebra file has no letters section")
        alphabet = Alphabet(tuple(self.letters))
        return Homomorphism(alphabet, self.algebra, self.letters)

    def recognizer(self) -> Recognizer:
        if self.accepting is None:
            raise FormatError("the algebra file has no accepting section")
        return Recognizer(self.hom(), self.accepting)

    @classmethod
    def of(cls, r: Recognizer | Homomorphism | ForestAlgebra) -> "AlgebraDocument":
        if isinstance(r, Recognizer):
            return cls(r.algebra, dict(zip(r.alphabet, r.hom.letter_image)), r.accepting)
        if isinstance(r, Homomorphism):
            return cls(r.algebra, dict(zip(r.alphabet, r.letter_image)))
        return cls(r)


def _names_ok(names) -> bool:
    return names is not None and all(n and not any(c.isspace() for c in n) for n in names)


def format_algebra(doc: AlgebraDocument | ForestAlgebra) -> str:
    if isinstance(doc, ForestAlgebra):
        doc = AlgebraDocument(doc)
    A = doc.algebra
    out = [HEADER, "algebra", f"H {A.n_h}"]
    if _names_ok(A.h_names):
        out.append("h-names " + " ".join(A.h_names))
    out.append(f"zero {A.zero}")
    out.append("add")
    out.extend(" ".join(map(str, row)) for row in A.h_add)
    out.append(f"V {A.n_v}")
    if _names_ok(A.v_names):
        out.append("v-names " + " ".join(A.v_names))
    out.append(f"one {A.one}")
    out.append("mul")
    out.extend(" ".join(map(str, row)) for row in A.v_mul)
    out.append("act")
    out.extend(" ".join(map(str, row)) for row in A.act)
    out.append("ins-pre " + " ".join(map(str, A.ins_pre)))
    out.append("ins-post " + " ".join(map(str, A.ins_post)))
    if doc.letters:
        out.append("letters " + " ".join(f"{a}={v}" for a, v in doc.letters.items()))
    if doc.accepting is not None:
        out.append("accepting " + " ".join(map(str, sorted(doc.accepting))))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_algebra(text: str) -> AlgebraDocument:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0][1] != HEADER:
        raise FormatError(f"missing header {HEADER!r}", lines[0][0] if lines else None)
    pos = 1

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise FormatError("unexpected end of file")
        pos += 1
        return lines[pos - 1]

    def ints(line, words, count=None):
        try:
            vals = [int(w) for w in words]
        except ValueError:
            raise FormatError("expected integers", line) from None
        if count is not None and len(vals) != count:
            raise FormatError(f"expected {count} values, got {len(vals)}", line)
        return vals

    def keyed(key):
        line, text_ = take()
        words = text_.split()
        if words[0] != key:
            raise FormatError(f"expected {key!r}, got {words[0]!r}", line)
        return line, words[1:]

    def table(rows, cols):
        out = []
        for _ in range(rows):
            line, row = take()
            out.append(ints(line, row.split(), cols))
        return out

    def optional(key):
        if pos < len(lines) and lines[pos][1].split()[0] == key:
            return keyed(key)
        return None

    line, words = keyed("algebra")
    line, words = keyed("H")
    n_h = ints(line, words, 1)[0]
    if n_h < 1:
        raise FormatError("H must be non-empty", line)
    got = optional("h-names")
    h_names = got[1] if got else None
    if h_names is not None and len(h_names) != n_h:
        raise FormatError("wrong number of h-names", got[0])
    line, words = keyed("zero")
    zero = ints(line, words, 1)[0]
    keyed("add")
    add = table(n_h, n_h)
    line, words = keyed("V")
    n_v = ints(line, words, 1)[0]
    got = optional("v-names")
    v_names = got[1] if got else None
    if v_names is not None and len(v_names) != n_v:
        raise FormatError("wrong number of v-names", got[0])
    line, words = keyed("one")
    one = ints(line, words, 1)[0]
    mul = None
    if optional("mul"):
        mul = table(n_v, n_v)
    keyed("act")
    act = table(n_v, n_h)
    line, words = keyed("ins-pre")
    ins_pre = ints(line, words, n_h)
    line, words = keyed("ins-post")
    ins_post = ints(line, words, n_h)
    letters = None
    got = optional("letters")
    if got:
        letters = {}
        for w in got[1]:
            sym, eq, val = w.partition("=")
            if not eq or not SYMBOL_RE.match(sym):
                raise FormatError(f"bad letter entry {w!r}", got[0])
            letters[sym] = ints(got[0], [val], 1)[0]
    accepting = None
    got = optional("accepting")
    if got:
        accepting = frozenset(ints(got[0], got[1]))
    line, last = take()
    if last != "end":
        raise FormatError("expected 'end'", line)
    if pos != len(lines):
        raise FormatError("trailing content after 'end'", lines[pos][0])

    for x in [zero] + [y for r in add for y in r] + [y for r in act for y in r] + list(accepting or ()):
        if not 0 <= x < n_h:
            raise FormatError(f"horizontal element {x} out of range")
    for x in [one] + ins_pre + ins_post + [y for r in (mul or []) for y in r] + list((letters or {}).values()):
        if not 0 <= x < n_v:
            raise FormatError(f"vertical element {x} out of range")
    A = ForestAlgebra(add, zero, mul, one, act, ins_pre, ins_post, h_names, v_names)
    try:
        bad = validate_algebra(A)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if bad:
        raise FormatError(f"not a forest algebra: {bad}")
    return AlgebraDocument(A, letters, accepting)


def read_algebra(path: str) -> AlgebraDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


def write_algebra(path: str, doc: AlgebraDocument | ForestAlgebra) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_algebra(doc))
