"""Command-line front end.

Every command prints a JSON document on stdout.  Verification commands
print a report whose checks are sorted by name; the exit code is 0 when no
check failed, 1 on FAIL and 2 on ERROR (bad input included).
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from .brackets import (DoubleBracketTable, check_double_poisson, check_loday,
                       check_quasi_poisson, single_bracket)
from .core import Element, Quiver, QuiverError, necklace_normal_form
from .forms import check_bisymplectic_equivalence, standard_bisymplectic
from .fusion import fuse_structure
from .parse import (ParseError, dump_document, format_element, format_tensor,
                    load_document, load_quiver, parse_element, parse_tensor,
                    quiver_from_dict, quiver_to_dict)
from .polyvectors import check_moment
from .repspace import (evaluate_element, gauge_action_check, induced_bracket_tensor,
                       is_zero, jacobi_residual, lie_poisson_tensor, quasi_structures_eval,
                       random_point, trace_checks)
from .report import ERROR, FAIL, CheckResult
from .samples import random_element
from .structures import (HamiltonianStructure, general_quasi, multiplicative_relation,
                         necklace_bracket, one_pair_quasi, preprojective_relation,
                         standard_hamiltonian, standard_table)

BUILTINS = ("hamiltonian", "quasi-one-pair", "quasi-general", "relation")
ALIASES = {"one-pair": "quasi-one-pair", "general": "quasi-general"}


class UsageError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def _csv(text: str | None) -> list:
    if not text:
        return []
    return [x.strip() for x in text.split(",") if x.strip()]


def _vertex(q: Quiver, token: str):
    for v in q.vertices:
        if str(v) == token:
            return v
    raise QuiverError(f"unknown vertex {token!r}")


def _fmt(x) -> str:
    return str(Fraction(x))


# -- loading ----------------------------------------------------------------

def _quiver(args) -> Quiver | None:
    if getattr(args, "quiver", None):
        return load_quiver(args.quiver)
    return None


def _builtin(name: str, q: Quiver | None, args) -> HamiltonianStructure:
    name = ALIASES.get(name, name)
    order = _csv(getattr(args, "order", None)) or None
    if name == "quasi-one-pair":
        return one_pair_quasi()
    if q is None:
        raise UsageError(f"builtin {name} needs --quiver")
    if not q.doubled:
        raise UsageError("builtin structures need a doubled quiver (double: true)")
    if name == "hamiltonian":
        S = standard_hamiltonian(q.with_order(order) if order else q)
        return S
    if name == "quasi-general":
        return general_quasi(q, order)
    raise UsageError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def _structure(args) -> HamiltonianStructure:
    if getattr(args, "structure", None):
        return HamiltonianStructure.from_dict(load_document(args.structure))
    if getattr(args, "builtin", None):
        return _builtin(args.builtin, _quiver(args), args)
    raise UsageError("give --builtin or --structure")


def load_bracket(path) -> DoubleBracketTable:
    """{"quiver": {...}, "bracket": [{"a": .., "b": .., "value": "u ⊗ v + ..."}]}."""
    d = load_document(path)
    q = quiver_from_dict(d["quiver"])
    vals = {}
    for item in d.get("bracket", []):
        a, b = item["pair"] if "pair" in item else (item["a"], item["b"])
        vals[(str(a), str(b))] = parse_tensor(str(item["value"]), q)
    return DoubleBracketTable(q, vals)


def bracket_to_dict(T: DoubleBracketTable) -> dict:
    return {"quiver": quiver_to_dict(T.quiver),
            "bracket": [{"a": a, "b": b, "value": format_tensor(v)} for a, b, v in T.items()]}


def _table(args) -> DoubleBracketTable:
    if getattr(args, "bracket", None):
        return load_bracket(args.bracket)
    if getattr(args, "structure", None) or getattr(args, "builtin", None):
        return _structure(args).table()
    q = _quiver(args)
    if q is not None and q.doubled:
        return standard_table(q)
    raise UsageError("give --bracket, --structure, --builtin or a doubled --quiver")


# -- reports ----------------------------------------------------------------

def _record(res: CheckResult, seconds: float | None) -> dict:
    rec = {"name": res.name, "status": res.status, "checked": res.checked,
           "residual": res.summary(),
           "params": {k: str(v) if isinstance(v, Fraction) else v
                      for k, v in sorted(res.params.items())}}
    if res.failures:
        rec["witness"] = res.failures[0][0]
    if seconds is not None:
        rec["seconds"] = f"{seconds:.3f}"
    return rec


def _report(argv, results, timings: bool) -> tuple:
    checks = sorted((_record(r, t if timings else None) for r, t in results),
                    key=lambda r: r["name"])
    statuses = {c["status"] for c in checks}
    code = 2 if ERROR in statuses else 1 if FAIL in statuses else 0
    overall = "ERROR" if code == 2 else "FAIL" if code == 1 else \
        ("PROBABLE" if "PROBABLE" in statuses else "PROVED")
    return {"command": list(argv), "checks": checks, "status": overall}, code


def _timed(fn, *a, **k):
    t0 = time.perf_counter()
    r = fn(*a, **k)
    return r, time.perf_counter() - t0


def _oracle(args) -> dict:
    return {"seed": args.seed}


# -- commands ---------------------------------------------------------------

def cmd_build(args) -> tuple:
    name = ALIASES.get(args.builtin, args.builtin)
    q = _quiver(args)
    if name == "relation":
        if q is None:
            raise UsageError("relation needs --quiver")
        params = {}
        for item in _csv(args.params):
            k, _, v = item.partition("=")
            params[_vertex(q, k)] = Fraction(v)
        if args.kind == "multiplicative":
            rel = multiplicative_relation(q, {v: params.get(v, 1) for v in q.vertices},
                                          _csv(args.order) or None)
        else:
            rel = preprojective_relation(q, params)
        doc = {"quiver": quiver_to_dict(rel.quiver), "relation": format_element(rel)}
        return doc, 0
    return _structure(args).to_dict(), 0


def _loday_samples(T: DoubleBracketTable, n: int, seed: int) -> list:
    rng = random.Random(seed)
    q = T.quiver
    return [tuple(random_element(q, rng, 2, 3) for _ in range(3)) for _ in range(n)]


def cmd_verify(args) -> tuple:
    results = []
    fallback = args.oracle_fallback
    what = args.what
    if what == "double-poisson":
        results.append(_timed(check_double_poisson, _table(args)))
    elif what == "quasi-poisson":
        results.append(_timed(check_quasi_poisson, _table(args), fallback, **_oracle(args)))
    elif what == "loday":
        T = _table(args)
        results.append(_timed(check_loday, T, _loday_samples(T, args.samples, args.seed)))
    elif what == "moment":
        S = _structure(args)
        results.append(_timed(check_moment, S.P, S.moment, S.kind, fallback, **_oracle(args)))
    elif what == "bisymplectic":
        q = _quiver(args)
        if q is None:
            raise UsageError("bisymplectic needs --quiver")
        omega = parse_element(args.form, q) if args.form else standard_bisymplectic(q)
        results.append(_timed(check_bisymplectic_equivalence, omega))
    return _report(args.argv, results, args.timings)


def cmd_fuse(args) -> tuple:
    S = _structure(args)
    pair = [x for item in args.merge for x in _csv(item)]
    if len(pair) != 2:
        raise UsageError("--merge needs two vertices v,w")
    v, w = (_vertex(S.quiver, x) for x in pair)
    return fuse_structure(S, v, w).to_dict(), 0


def _dims(args, q: Quiver) -> list:
    dims = [int(x) for x in _csv(args.dims)]
    if len(dims) == 1:
        dims = dims * len(q.vertices)
    if len(dims) != len(q.vertices):
        raise UsageError("--dims needs one entry per vertex (or a single entry)")
    return dims


def _matrix(m) -> list:
    return [[_fmt(x) for x in row] for row in m.tolist()]


def cmd_rep(args) -> tuple:
    if args.action == "eval":
        q = _quiver(args)
        if q is None:
            raise UsageError("rep eval needs --quiver")
        p = random_point(q, _dims(args, q), seed=args.seed)
        doc = {"dims": _dims(args, q), "seed": args.seed}
        if args.expr:
            x = parse_element(args.expr, q)
            doc["value"] = _matrix(evaluate_element(x, p))
        if args.pair:
            T = _table(args)
            p = random_point(T.quiver, _dims(args, T.quiver), seed=args.seed)
            a, b = (parse_element(s, T.quiver) for s in args.pair)
            B = induced_bracket_tensor(T, a, b, p)
            n = p.N
            doc["bracket"] = {f"{i}{j},{u}{v}": _fmt(B[i, j, u, v])
                              for i in range(n) for j in range(n)
                              for u in range(n) for v in range(n) if B[i, j, u, v]}
        return doc, 0
    results = []
    for check in args.check or ["jacobi"]:
        results.append(_timed(_rep_check, check, args))
    return _report(args.argv, results, args.timings)


def _rep_check(check: str, args) -> CheckResult:
    if check == "moment":
        S = _structure(args)
        p = random_point(S.quiver, _dims(args, S.quiver), seed=args.seed)
        return quasi_structures_eval(S, p)
    if check == "gauge":
        q = _quiver(args) or _table(args).quiver
        return gauge_action_check(q, random_point(q, _dims(args, q), seed=args.seed))
    T = _table(args)
    q = T.quiver
    p = random_point(q, _dims(args, q), seed=args.seed)
    rng = random.Random(args.seed)
    res = CheckResult(f"rep-{check}")
    res.params = {"dims": _dims(args, q), "seed": args.seed, "samples": args.samples}
    for _ in range(args.samples):
        a, b, c = (random_element(q, rng, 2, 2) for _ in range(3))
        res.checked += 1
        if check == "jacobi":
            R, _ = jacobi_residual(T, a, b, c, p)
            if not is_zero(R):
                res.fail(f"({a}, {b}, {c})", "Jacobi residual nonzero")
        elif check == "trace":
            sub = trace_checks(T, a, b, p)
            if not sub:
                res.fail(*sub.failures[0])
        elif check == "lie-poisson":
            if len(q.arrows) != 1 or len(q.vertices) != 1:
                raise UsageError("lie-poisson needs the one-loop quiver")
            t = Element.letter(q, q.arrows[0].id)
            if not is_zero(induced_bracket_tensor(T, t, t, p) - lie_poisson_tensor(p, t)):
                res.fail("(t, t)", "induced tensor differs from the Lie-Poisson tensor")
            break
        else:
            raise UsageError(f"unknown check {check!r}")
    return res


def cmd_necklace(args) -> tuple:
    q = _quiver(args)
    if q is None:
        raise UsageError("necklace needs --quiver")
    x, y = (parse_element(s, q) for s in (args.x, args.y))
    if args.bracket:
        T = load_bracket(args.bracket)
        val = necklace_normal_form(single_bracket(T, necklace_normal_form(x),
                                                  necklace_normal_form(y)))
    else:
        val = necklace_bracket(x, y)
    return {"x": format_element(x), "y": format_element(y),
            "bracket": format_element(val)}, 0


# -- parser -----------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quiver", help="quiver file (JSON or YAML)")
    p.add_argument("--structure", help="structure file written by build")
    p.add_argument("--bracket", help="bracket table file")
    p.add_argument("--builtin", help=f"one of {', '.join(BUILTINS)}")
    p.add_argument("--order", help="arrow ordering, comma separated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", help="dimension vector, comma separated")
    p.add_argument("--out", help="also write the output document to this file")
    p.add_argument("--oracle-fallback", type=_bool, default=True, metavar="BOOL")
    p.add_argument("--timings", action="store_true",
                   help="add wall times (makes reports non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="doublepoisson",
                                 description="Double (quasi-)Poisson calculus on quivers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a named structure")
    _common(p)
    p.add_argument("name", nargs="?", help="builtin name (same as --builtin)")
    p.add_argument("--kind", choices=("additive", "multiplicative"), default="additive")
    p.add_argument("--params", help="relation parameters v=value, comma separated")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run a verification")
    p.add_argument("what", choices=("double-poisson", "quasi-poisson", "moment", "loday",
                                    "bisymplectic"))
    _common(p)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--form", help="2-form for bisymplectic (default: the standard form)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuse", help="fuse two vertices of a structure")
    _common(p)
    p.add_argument("--merge", required=True, nargs="+", help="v w (or v,w)")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("rep", help="representation-space evaluation")
    p.add_argument("action", choices=("eval", "check"))
    _common(p)
    p.add_argument("--check", action="append",
                   choices=("jacobi", "trace", "gauge", "lie-poisson", "moment"))
    p.add_argument("--expr", help="element to evaluate")
    p.add_argument("--pair", nargs=2, metavar=("A", "B"),
                   help="evaluate the induced bracket {A_ij, B_uv}")
    p.add_argument("--samples", type=int, default=5)
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("necklace", help="necklace bracket of two words")
    _common(p)
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_necklace)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    args.argv = argv
    if args.command == "build":
        if args.name and args.builtin and args.name != args.builtin:
            ap.error("builtin given twice")
        args.builtin = args.builtin or args.name
        if not args.builtin:
            ap.error("build needs a builtin name")
    try:
        doc, code = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, QuiverError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dump_document(doc)
    sys.stdout.write(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
