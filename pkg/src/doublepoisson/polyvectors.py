"""Poly-vector fields: Schouten bracket, gauge elements, the mu map."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct
from typing import Mapping

from .brackets import BracketEngine, DoubleBracketTable, outer_left, outer_right
from .core import (ARROW, DERIVATION, DIFFERENTIAL, INVERSE, VERTEX, Element,
                   MixedQuiverError, Quiver, QuiverError, Tensor, add_into,
                   concat, localize_normal_form)
from .report import CheckResult


def _schouten_gen(q: Quiver):
    def gen(l1, l2):
        k1, i1 = l1
        k2, i2 = l2
        if DIFFERENTIAL in (k1, k2):
            raise QuiverError("differential letters have no Schouten bracket")
        if i1 != i2:
            return {}
        t, h = q.tail(i1), q.head(i1)
        if k1 == DERIVATION and k2 == ARROW:
            return {(((VERTEX, t),), ((VERTEX, h),)): Fraction(1)}
        if k1 == ARROW and k2 == DERIVATION:
            return {(((VERTEX, h),), ((VERTEX, t),)): Fraction(-1)}
        return {}
    return gen


def schouten_engine(q: Quiver) -> BracketEngine:
    eng = q._cache.get("schouten")
    if eng is None:
        eng = q._cache["schouten"] = BracketEngine(q, _schouten_gen(q), -1)
    return eng


def schouten_double_bracket(P: Element, Q: Element) -> Tensor:
    if P.quiver is not Q.quiver and P.quiver != Q.quiver:
        raise MixedQuiverError("operands live over different quivers")
    return schouten_engine(P.quiver).bracket(P, Q)


def schouten_single(P: Element, Q: Element) -> Element:
    if P.quiver is not Q.quiver and P.quiver != Q.quiver:
        raise MixedQuiverError("operands live over different quivers")
    return schouten_engine(P.quiver).single(P, Q)


def schouten_triple(a: Element, b: Element, c: Element) -> Tensor:
    """Graded triple bracket; vanishes identically for the Schouten bracket."""
    return schouten_engine(a.quiver).triple(a, b, c, graded=True)


def gauge_element(q: Quiver, v) -> Element:
    i = q.vertex_index(v)
    terms: dict = {}
    for j in range(len(q.arrows)):
        if q.head(j) == i:
            add_into(terms, ((DERIVATION, j), (ARROW, j)), Fraction(1))
        if q.tail(j) == i:
            add_into(terms, ((ARROW, j), (DERIVATION, j)), Fraction(-1))
    return Element._raw(q, terms)


def total_gauge(q: Quiver) -> Element:
    out = Element.zero(q)
    for v in q.vertices:
        out = out + gauge_element(q, v)
    return out


# -- grade-1 factors acting on the algebra ------------------------------

def split_factors(word) -> list:
    """Cut c0 D(b1) c1 D(b2) c2 ... into (prefix, arrow, suffix) factors.

    The first factor keeps c0; later factors have an empty prefix.
    """
    pos = [k for k, l in enumerate(word) if l[0] == DERIVATION]
    out = []
    for n, p in enumerate(pos):
        end = pos[n + 1] if n + 1 < len(pos) else len(word)
        pre = word[:p] if n == 0 else ()
        out.append((pre, word[p][1], word[p + 1:end]))
    return out


def factor_on_letter(q: Quiver, f, letter) -> dict:
    """(c D(b) c')(l) = D_b(l)' c' (x) c D_b(l)'' for a single letter l."""
    cache = q._cache.setdefault("factor", {})
    key = (f, letter)
    hit = cache.get(key)
    if hit is not None:
        return hit
    pre, b, post = f
    k, i = letter
    res: dict = {}
    if k == ARROW:
        if i == b:
            left = post if post else ((VERTEX, q.tail(b)),)
            right = pre if pre else ((VERTEX, q.head(b)),)
            res = {(left, right): Fraction(1)}
    elif k == INVERSE:
        c, cs = i, q.partner(i)
        inner = outer_right(q, factor_on_letter(q, f, (ARROW, c)), ((ARROW, cs),))
        for kk, v in outer_left(q, ((ARROW, c),), factor_on_letter(q, f, (ARROW, cs))).items():
            add_into(inner, kk, v)
        s = (letter,)
        for kk, v in outer_right(q, outer_left(q, s, inner), s).items():
            add_into(res, kk, -v)
    elif k != VERTEX:
        raise QuiverError("derivations act on degree-0 elements only")
    cache[key] = res
    return res


def factor_on_word(q: Quiver, f, word) -> dict:
    if word[0][0] == VERTEX:
        return {}
    out: dict = {}
    for k, l in enumerate(word):
        part = factor_on_letter(q, f, l)
        if not part:
            continue
        if k:
            part = outer_left(q, word[:k], part)
        if k + 1 < len(word):
            part = outer_right(q, part, word[k + 1:])
        for kk, c in part.items():
            add_into(out, kk, c)
    return out


def factor_on_terms(q: Quiver, f, terms: Mapping) -> dict:
    out: dict = {}
    for w, c in terms.items():
        for kk, v in factor_on_word(q, f, w).items():
            add_into(out, kk, c * v)
    return out


def apply_derivation(delta: Element, x: Element) -> Tensor:
    """Value of the grade-1 poly-vector delta (a double derivation) on x."""
    q = delta.quiver
    if x.quiver is not q and x.quiver != q:
        raise MixedQuiverError("operands live over different quivers")
    out: dict = {}
    for w, c in delta.terms.items():
        fs = split_factors(w)
        if len(fs) != 1 or any(l[0] == DIFFERENTIAL for l in w):
            raise ValueError("apply_derivation needs a grade-1 poly-vector")
        for kk, v in factor_on_terms(q, fs[0], x.terms).items():
            add_into(out, kk, c * v)
    return localize_normal_form(Tensor._raw(q, 2, out))


# -- the mu map -----------------------------------------------------------

def _tilde(q: Quiver, factors, args) -> dict:
    n = len(factors)
    values = [factor_on_terms(q, f, a.terms) for f, a in zip(factors, args)]
    if not all(values):
        return {}
    out: dict = {}
    for combo in _iproduct(*(v.items() for v in values)):
        c = Fraction(1)
        comps = []
        for k in range(n):
            (u, _), _ = combo[k - 1]
            (_, v), _ = combo[k]
            w = concat(q, u, v)
            if w is None:
                break
            comps.append(w)
        else:
            for _, cf in combo:
                c *= cf
            add_into(out, tuple(comps), c)
    return out


class NBracket:
    """The n-bracket {{-,...,-}}_Q attached to a grade-n poly-vector."""

    def __init__(self, Qv: Element):
        q = Qv.quiver
        grades = Qv.grades()
        if any(l[0] == DIFFERENTIAL for w in Qv.terms for l in w):
            raise ValueError("poly-vectors may not contain differential letters")
        if len(grades) > 1:
            raise ValueError("poly-vector is not homogeneous")
        n = grades.pop() if grades else 0
        if n < 1 and Qv:
            raise ValueError("grade must be at least 1")
        self.quiver, self.polyvector, self.n = q, Qv, n
        self._words = []
        for w, c in Qv.terms.items():
            fs = split_factors(w)
            for i in range(n):
                rot = fs[n - i:] + fs[:n - i]
                sign = -1 if (n - 1) * i % 2 else 1
                self._words.append((rot, c * sign))

    def __call__(self, *args: Element) -> Tensor:
        q = self.quiver
        if not self.polyvector:
            return Tensor.zero(q, max(len(args), 1))
        if len(args) != self.n:
            raise ValueError(f"expected {self.n} arguments")
        for a in args:
            if a.quiver is not q and a.quiver != q:
                raise MixedQuiverError("operand over a different quiver")
        out: dict = {}
        for rot, c in self._words:
            for k, v in _tilde(q, rot, args).items():
                add_into(out, k, c * v)
        return localize_normal_form(Tensor._raw(q, self.n, out))

    def table(self) -> DoubleBracketTable:
        """Generator table of a 2-bracket."""
        if self.n != 2:
            raise ValueError("only 2-brackets have a double bracket table")
        q = self.quiver
        vals = {}
        for a in q.arrows:
            for b in q.arrows:
                x = Element.letter(q, a.id)
                y = Element.letter(q, b.id)
                vals[(a.id, b.id)] = self(x, y)
        return DoubleBracketTable(q, vals)


def bracket_from_polyvector(Qv: Element) -> NBracket:
    return NBracket(Qv)


def derivation_to_polyvector(q: Quiver, values: Mapping) -> Element:
    """sum_a delta(a)'' D(a) delta(a)' from the values on arrows."""
    out: dict = {}
    for a, t in values.items():
        j = q.arrow_index(a)
        if t.quiver is not q and t.quiver != q:
            raise MixedQuiverError("value over a different quiver")
        for (u, v), c in t.terms.items():
            w = concat(q, v, ((DERIVATION, j),))
            w = concat(q, w, u) if w is not None else None
            if w is None:
                raise ValueError(f"value on {a} does not compose with D({a})")
            add_into(out, w, c)
    return Element._raw(q, out)


def hamiltonian_field(T: DoubleBracketTable, x: Element) -> Element:
    if x.degree() != 0:
        raise ValueError("Hamiltonian fields are defined for degree-0 elements")
    q = T.quiver
    values = {a.id: T.engine.bracket(x, Element.letter(q, a.id)) for a in q.arrows}
    return derivation_to_polyvector(q, values)


def _grade1_equal(x: Element, y: Element, fallback: bool, oracle: dict):
    """Compare grade-1 poly-vectors; returns (status or None, residual)."""
    if x == y:
        return "PROVED", None
    if fallback:
        from .repspace import tensors_equal
        q = x.quiver
        info: dict = {}
        for a in q.arrows:
            xa = Element.letter(q, a.id)
            ok, info = tensors_equal(apply_derivation(x, xa), apply_derivation(y, xa), **oracle)
            if not ok:
                return None, x - y
        return "PROBABLE", info
    return None, x - y


def check_moment(P: Element, m: Element, kind: str = "additive",
                 fallback: bool = True, **oracle) -> CheckResult:
    """Additive: {P, mu_i} = -E_i.  Multiplicative: {P, Phi_i} = -1/2(E_i Phi_i + Phi_i E_i)."""
    if kind not in ("additive", "multiplicative"):
        raise ValueError("kind must be additive or multiplicative")
    q = P.quiver
    res = CheckResult(f"moment-{kind}")
    m = localize_normal_form(m)
    parts = [m.corner(v) for v in q.vertices]
    if sum(parts, Element.zero(q)) != m:
        res.fail("decomposition", "moment element has open components")
        return res
    for v, mi in zip(q.vertices, parts):
        E = gauge_element(q, v)
        lhs = schouten_single(P, mi)
        if kind == "additive":
            rhs = -E
        else:
            rhs = localize_normal_form((E * mi + mi * E).scale(Fraction(-1, 2)))
        res.checked += 1
        status, info = _grade1_equal(lhs, rhs, fallback, oracle)
        if status is None:
            res.fail(f"vertex {v}", str(info))
        elif status == "PROBABLE":
            res.weaken(info)
    return res
