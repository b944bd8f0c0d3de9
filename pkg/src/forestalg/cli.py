"""Command-line front end.

Exit codes: 0 on success, 1 when a property fails or a check does not
match, 2 on usage, parse or format errors (and when a size guard stops a
computation; raise it with ``--max-elements``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import (DEFAULT_LIMIT, ForestAlgebra, SizeGuardExceeded, eval_context,
                      eval_forest, syntactic_algebra)
from .classify import (classification_report, horizontal_confusion,
                       uniform_vertical_confusion, vertical_confusion)
from .decompose import NotEFAlgebra, ef_decompose, verify_embedding
from .formats import AlgebraDocument, FormatError, format_algebra, read_algebra, write_algebra
from .logic import (FormulaSyntaxError, RegexSyntaxError, compile_to_recognizer, forest_sat,
                    format_formula, formula_labels, parse_formula)
from .products import WreathVertical, full_wreath, wreath_generated
from .terms import (Alphabet, ForestSyntaxError, UnknownSymbolError, format_forest, hole_count,
                    parse_forest)

__all__ = ["main", "build_parser"]


class _Fail(Exception):
    """Property violation or mismatch (exit code 1)."""


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _write_or_print(args, doc: AlgebraDocument, extra: dict, summary: str) -> None:
    text = format_algebra(doc)
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit(args, dict(extra, output=out), f"{summary}; wrote {out}")
    elif args.json:
        _emit(args, dict(extra, algebra=text), "")
    else:
        sys.stdout.write(text)


def _sizes(A: ForestAlgebra) -> dict:
    return {"h_size": A.n_h, "v_size": A.n_v}


def _alphabet(text: str | None, phi) -> Alphabet:
    if text:
        return Alphabet(tuple(s.strip() for s in text.split(",") if s.strip()))
    return Alphabet(tuple(sorted(formula_labels(phi))) or ("a",))


# ----------------------------------------------------------------- commands

def cmd_eval(args) -> None:
    doc = read_algebra(args.algebra)
    hom = doc.hom()
    forest = parse_forest(args.forest, hom.alphabet)
    A = hom.algebra
    if hole_count(forest):
        v = eval_context(hom, forest)
        _emit(args, {"kind": "context", "value": v, "name": A.v_name(v)},
              f"context value {A.v_name(v)}")
        return
    h = eval_forest(hom, forest)
    data = {"kind": "forest", "value": h, "name": A.h_name(h)}
    text = f"value {A.h_name(h)}"
    if doc.accepting is not None:
        data["accepted"] = h in doc.accepting
        text += " (accepted)" if data["accepted"] else " (rejected)"
    _emit(args, data, text)


def cmd_sat(args) -> None:
    phi = parse_formula(args.formula)
    forest = parse_forest(args.forest)
    result = forest_sat(forest, phi)
    _emit(args, {"formula": format_formula(phi), "forest": format_forest(forest), "sat": result},
          "true" if result else "false")


def cmd_compile(args) -> None:
    phi = parse_formula(args.formula)
    alphabet = _alphabet(args.alphabet, phi)
    r = compile_to_recognizer(phi, alphabet, args.max_elements)
    _write_or_print(args, AlgebraDocument.of(r), dict(_sizes(r.algebra), formula=format_formula(phi)),
                    f"compiled {format_formula(phi)}: |H|={r.algebra.n_h}, |V|={r.algebra.n_v}")


def cmd_syntactic(args) -> None:
    r = read_algebra(args.algebra).recognizer()
    s = syntactic_algebra(r, args.max_elements)
    _write_or_print(args, AlgebraDocument.of(s.recognizer), _sizes(s.algebra),
                    f"syntactic algebra: |H|={s.algebra.n_h}, |V|={s.algebra.n_v}")


def cmd_classify(args) -> None:
    A = read_algebra(args.algebra).algebra
    report = classification_report(A, limit=args.max_elements)
    _emit(args, report.as_dict(), report.render())


_DETECTORS = {
    "vertical": vertical_confusion,
    "uniform": uniform_vertical_confusion,
    "horizontal": lambda A, limit: horizontal_confusion(A, limit=limit),
}


def cmd_confusion(args) -> None:
    A = read_algebra(args.algebra).algebra
    w = _DETECTORS[args.kind](A, limit=args.max_elements)
    if w is None:
        _emit(args, {"kind": args.kind, "confusion": False}, f"no {args.kind} confusion")
        return
    if not w.replay(A):
        raise _Fail(f"witness failed to replay: {w}")
    data = {"kind": args.kind, "confusion": True, "witness": str(w),
            "multicontext": format_forest(w.multicontext),
            "symbols": {name: v for name, v in w.symbols},
            "cycle": list(w.cycle), "subset": sorted(w.subset)}
    _emit(args, data, str(w))


def cmd_decompose(args) -> None:
    A = read_algebra(args.algebra).algebra
    try:
        e = ef_decompose(A, args.max_elements)
    except NotEFAlgebra as exc:
        raise _Fail(str(exc)) from None
    bad = verify_embedding(e)
    data = {"expression": str(e.expression), "u1_atoms": e.u1_atoms, "depth": e.depth,
            "target": _sizes(e.target), "h_map": list(e.h_map), "v_map": list(e.v_map),
            "verified": bad is None}
    _emit(args, data, "\n".join([
        f"expression: {e.expression}",
        f"U1 atoms: {e.u1_atoms}, wreath depth: {e.depth}",
        f"target: |H|={e.target.n_h}, |V|={e.target.n_v}",
        f"h_map: {list(e.h_map)}",
        f"verified: {'yes' if bad is None else bad}",
    ]))
    if bad is not None:
        raise _Fail(f"embedding check failed: {bad}")


def cmd_wreath(args) -> None:
    A1 = read_algebra(args.left).algebra
    A2 = read_algebra(args.right).algebra
    if args.full:
        W = full_wreath(A1, A2, args.max_elements)
    else:
        gens = [WreathVertical(v, (w,) * A1.n_h) for v in range(A1.n_v) for w in range(A2.n_v)]
        W, _ = wreath_generated(A1, A2, gens, args.max_elements)
    mode = "full" if args.full else "generated"
    _write_or_print(args, AlgebraDocument(W), dict(_sizes(W), mode=mode),
                    f"{mode} wreath product: |H|={W.n_h}, |V|={W.n_v}")


def cmd_corpus(args) -> None:
    from .corpus import EXAMPLES, get_example, run_paper_suite
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for name in EXAMPLES:
            b = get_example(name)
            write_algebra(os.path.join(args.export, f"{name}.alg"), AlgebraDocument.of(b.recognizer))
            if b.formula is not None:
                with open(os.path.join(args.export, f"{name}.formula"), "w", encoding="utf-8") as fh:
                    fh.write(format_formula(b.formula) + "\n")
    if args.suite:
        res = run_paper_suite()
        _emit(args, {"ok": res.ok, "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in res.checks]},
              res.render())
        if not res.ok:
            raise _Fail(f"{len(res.failures())} corpus checks failed")
        return
    rows = []
    for name in EXAMPLES:
        b = get_example(name)
        A = b.recognizer.algebra
        rows.append({"name": name, "alphabet": list(b.alphabet), **_sizes(A),
                     "formula": None if b.formula is None else format_formula(b.formula)})
    _emit(args, {"examples": rows}, "\n".join(
        f"{r['name']}: alphabet {{{','.join(r['alphabet'])}}}, |H|={r['h_size']}, |V|={r['v_size']}"
        + (f", formula {r['formula']}" if r["formula"] else "") for r in rows))


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max-elements", type=int, default=DEFAULT_LIMIT, metavar="N",
                        help=f"size guard for generated structures (default {DEFAULT_LIMIT})")
    p = argparse.ArgumentParser(prog="forestalg",
                                description="Finite forest algebras and temporal logics over forests.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate a forest or context")
    s.add_argument("algebra")
    s.add_argument("forest")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sat", parents=[common], help="check a formula on a forest")
    s.add_argument("formula")
    s.add_argument("forest")
    s.set_defaults(func=cmd_sat)

    s = sub.add_parser("compile", parents=[common], help="compile a formula to its minimal recognizer")
    s.add_argument("formula")
    s.add_argument("-o", "--output")
    s.add_argument("--alphabet", help="comma-separated symbols (default: labels of the formula)")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("syntactic", parents=[common], help="syntactic algebra of a recognizer")
    s.add_argument("algebra")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_syntactic)

    s = sub.add_parser("classify", parents=[common], help="definability report")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("confusion", parents=[common], help="search for a confusion witness")
    s.add_argument("algebra")
    s.add_argument("--kind", choices=sorted(_DETECTORS), default="vertical")
    s.set_defaults(func=cmd_confusion)

    s = sub.add_parser("decompose-ef", parents=[common], help="embed an EF algebra into U1 wreaths")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("wreath", parents=[common], help="wreath product of two algebras")
    s.add_argument("left")
    s.add_argument("right")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--full", action="store_true", help="every pair (v, f)")
    mode.add_argument("--generated", action="store_true",
                      help="generated by (v, constant w) and the insertions (default)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_wreath)

    s = sub.add_parser("corpus", parents=[common], help="list, export or check the example corpus")
    s.add_argument("--suite", action="store_true", help="run the inexpressibility checks")
    s.add_argument("--export", metavar="DIR", help="write bundle algebras and formulas to DIR")
    s.set_defaults(func=cmd_corpus)
    return p


_USAGE_ERRORS = (FormatError, ForestSyntaxError, FormulaSyntaxError, RegexSyntaxError,
                 UnknownSymbolError, OSError, KeyError, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except _Fail as exc:
        print(f"forestalg: {exc}", file=sys.stderr)
        return 1
    except SizeGuardExceeded as exc:
        print(f"forestalg: {exc} (raise --max-elements)", file=sys.stderr)
        return 2
    except _USAGE_ERRORS as exc:
        print(f"forestalg: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
