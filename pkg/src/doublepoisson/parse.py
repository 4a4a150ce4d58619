"""Text formats: expressions, quiver documents, rational rendering."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .core import (ARROW, DERIVATION, DIFFERENTIAL, INVERSE, VERTEX, Arrow,
                   Element, Quiver, QuiverError, Tensor, build_doubled_quiver)


class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.column = line, col


def fmt_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_word(q: Quiver, w) -> str:
    return "·".join(q.letter_name(x) for x in w)


def _format_terms(items, render) -> str:
    parts = []
    for key, c in items:
        body = render(key)
        mag = abs(c)
        s = body if mag == 1 else f"{fmt_rational(mag)} {body}"
        if not parts:
            parts.append(("-" if c < 0 else "") + s)
        else:
            parts.append(("- " if c < 0 else "+ ") + s)
    return " ".join(parts) if parts else "0"


def format_element(x: Element) -> str:
    q = x.quiver
    return _format_terms(sorted(x.terms.items()), lambda w: format_word(q, w))


def format_tensor(x: Tensor) -> str:
    q = x.quiver
    return _format_terms(sorted(x.terms.items()),
                         lambda key: " ⊗ ".join(format_word(q, w) for w in key))


# -- expressions ----------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUM = re.compile(r"\d+(?:/\d+)?")
_FUNCS = {"e": VERTEX, "D": DERIVATION, "inv": INVERSE, "d": DIFFERENTIAL}


def _tokenize(text: str, q: Quiver) -> list:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("(x)", i):
            toks.append(("TENS", "⊗", i))
            i += 3
            continue
        if ch == "⊗":
            toks.append(("TENS", ch, i))
            i += 1
            continue
        if ch in "·.":
            toks.append(("MUL", ch, i))
            i += 1
            continue
        if ch in "+-()*,":
            toks.append((ch, ch, i))
            i += 1
            continue
        m = _NUM.match(text, i)
        if m:
            toks.append(("NUM", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            name, j = m.group(), m.end()
            # a trailing star belongs to the id when that names an arrow and
            # is not followed by something a product could continue with
            if j < n and text[j] == "*" and q.has_arrow(name + "*"):
                nxt = text[j + 1] if j + 1 < n else ""
                if not (nxt == "(" or nxt == "_" or nxt.isalpha()):
                    name, j = name + "*", j + 1
            toks.append(("ID", name, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", text, i)
    toks.append(("END", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, q: Quiver):
        self.text, self.q = text, q
        self.toks = _tokenize(text, q)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None):
        t = self.toks[self.k]
        if kind is not None and t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1] or 'end of input'!r}",
                             self.text, t[2])
        self.k += 1
        return t

    def error(self, msg):
        raise ParseError(msg, self.text, self.peek()[2])

    def parse(self):
        v = self.sum()
        if self.peek()[0] != "END":
            self.error(f"unexpected {self.peek()[1]!r}")
        return v

    def sum(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = _scale(self.tensor(), sign)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            acc = _add(acc, _scale(self.tensor(), sign), self)
        return acc

    def tensor(self):
        factors = [self.product()]
        while self.peek()[0] == "TENS":
            self.take()
            factors.append(self.product())
        if len(factors) == 1:
            return factors[0]
        els = []
        for f in factors:
            if isinstance(f, Tensor):
                self.error("nested tensor products are not supported")
            els.append(_as_element(f, self.q))
        return Tensor.of(*els)

    def product(self):
        acc = self.unary()
        while True:
            t = self.peek()[0]
            if t in ("MUL", "*"):
                self.take()
                acc = _mul(acc, self.unary(), self)
            elif t in ("ID", "NUM", "("):
                acc = _mul(acc, self.unary(), self)
            else:
                return acc

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return _scale(self.unary(), -1)
        return self.atom()

    def atom(self):
        kind, val, pos = self.peek()
        q = self.q
        if kind == "NUM":
            self.take()
            return Fraction(val)
        if kind == "(":
            self.take()
            v = self.sum()
            self.take(")")
            return v
        if kind == "ID":
            self.take()
            if val in _FUNCS and self.peek()[0] == "(":
                self.take("(")
                arg = self.take()
                if arg[0] not in ("ID", "NUM"):
                    raise ParseError("expected an identifier", self.text, arg[2])
                self.take(")")
                fk = _FUNCS[val]
                try:
                    if fk == VERTEX:
                        vid = _vertex_id(q, arg[1])
                        return Element.idem(q, vid)
                    return Element.letter(q, arg[1], fk)
                except QuiverError as exc:
                    raise ParseError(str(exc), self.text, arg[2]) from None
            if not q.has_arrow(val):
                raise ParseError(f"unknown arrow id {val!r}", self.text, pos)
            return Element.letter(q, val, ARROW)
        self.error(f"unexpected {val or 'end of input'!r}")


def _vertex_id(q: Quiver, token: str):
    for v in q.vertices:
        if str(v) == token:
            return v
    raise QuiverError(f"unknown vertex {token!r}")


def _as_element(x, q):
    if isinstance(x, Fraction):
        return Element.one(q).scale(x)
    return x


def _scale(x, c):
    if isinstance(x, Fraction):
        return x * c
    return x.scale(c)


def _mul(x, y, p):
    if isinstance(x, Fraction):
        return _scale(y, x)
    if isinstance(y, Fraction):
        return _scale(x, y)
    if isinstance(x, Tensor) or isinstance(y, Tensor):
        p.error("cannot multiply tensors")
    return x * y


def _add(x, y, p):
    if isinstance(x, Fraction):
        x = _as_element(x, p.q)
    if isinstance(y, Fraction):
        y = _as_element(y, p.q)
    if type(x) is not type(y):
        p.error("cannot add an element and a tensor")
    return x + y


def parse_expression(text: str, q: Quiver):
    """Parse an element or tensor expression over ``q``.

    Bare rationals stand for multiples of the unit sum_i e(i).
    """
    v = _Parser(str(text), q).parse()
    return _as_element(v, q)


def parse_element(text: str, q: Quiver) -> Element:
    v = parse_expression(text, q)
    if not isinstance(v, Element):
        raise ParseError("expected an element, got a tensor", str(text), 0)
    return v


def parse_tensor(text: str, q: Quiver) -> Tensor:
    v = parse_expression(text, q)
    if isinstance(v, Element):
        if not v:
            return Tensor.zero(q, 2)
        raise ParseError("expected a tensor, got an element", str(text), 0)
    return v


# -- documents ------------------------------------------------------------

def quiver_from_dict(d: dict) -> Quiver:
    try:
        vertices = list(d["vertices"])
        arrows = [Arrow(str(a["id"]), a["tail"], a["head"]) for a in d.get("arrows", [])]
    except (KeyError, TypeError) as exc:
        raise QuiverError(f"malformed quiver document: {exc}") from None
    q = Quiver(tuple(vertices), tuple(arrows))
    if d.get("double"):
        q = build_doubled_quiver(q)
    if d.get("order"):
        q = q.with_order([str(a) for a in d["order"]])
    if d.get("invert"):
        q = q.with_inverted([str(a) for a in d["invert"]])
    return q


def quiver_to_dict(q: Quiver) -> dict:
    d: dict = {"vertices": list(q.vertices)}
    if q.units:
        raise QuiverError("quivers with unit arrows are internal and not serializable")
    if q.doubled:
        base = [q.arrows[i] for i in q.base_arrows]
        plain = Quiver(q.vertices, tuple(base))
        canon = build_doubled_quiver(plain)
        if canon.arrows != q.arrows:
            raise QuiverError("doubled quiver is not in canonical (a, a*) arrow order")
        d["arrows"] = [{"id": a.id, "tail": a.tail, "head": a.head} for a in base]
        d["double"] = True
        default = canon.order
    else:
        d["arrows"] = [{"id": a.id, "tail": a.tail, "head": a.head} for a in q.arrows]
        default = tuple(a.id for a in q.arrows)
    if q.order != default:
        d["order"] = list(q.order)
    if q.inverted:
        d["invert"] = list(q.inverted)
    return d


def load_document(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        import yaml
    except ImportError:  # pragma: no cover
        raise ParseError("not valid JSON and PyYAML is unavailable", text, 0) from None
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        pos = 0
        if mark is not None:
            pos = sum(len(x) + 1 for x in text.split("\n")[:mark.line]) + mark.column
        raise ParseError(f"invalid document: {getattr(exc, 'problem', exc)}", text, pos) from None


def dump_document(d: dict) -> str:
    return json.dumps(d, indent=2, ensure_ascii=False) + "\n"


def load_quiver(path) -> Quiver:
    d = load_document(path)
    if isinstance(d, dict) and "quiver" in d and "vertices" not in d:
        d = d["quiver"]
    return quiver_from_dict(d)
