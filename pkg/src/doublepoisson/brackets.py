"""Double, triple and associated brackets on (localized) path algebras.

All brackets here, including the Schouten and Koszul ones, go through
:class:`BracketEngine`: a bracket of degree ``d`` is fixed by its values on
pairs of letters, extended by the graded Leibniz rule in the second argument
and graded antisymmetry.  Inverse letters are handled by
{{x, s}} = -s {{x, c c*}} s for s = (e + c c*)^{-1}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .core import (ARROW, CYC3, CYC3_INV, INVERSE, SWAP, VERTEX, Element,
                   MixedQuiverError, Quiver, QuiverError, Tensor, add_into,
                   concat, localize_normal_form, permute_key,
                   word_degree)
from .report import CheckResult

GenFn = Callable[[tuple, tuple], dict]


def outer_left(q: Quiver, w, terms: Mapping) -> dict:
    """w . (u (x) ... ) with w a word."""
    out: dict = {}
    for key, c in terms.items():
        f = concat(q, w, key[0])
        if f is not None:
            add_into(out, (f,) + key[1:], c)
    return out


def outer_right(q: Quiver, terms: Mapping, w) -> dict:
    out: dict = {}
    for key, c in terms.items():
        f = concat(q, key[-1], w)
        if f is not None:
            add_into(out, key[:-1] + (f,), c)
    return out


def swap_terms(terms: Mapping, signed: bool, coeff=1) -> dict:
    out: dict = {}
    for key, c in terms.items():
        sign, nk = permute_key(SWAP, key, signed)
        add_into(out, nk, c * sign * coeff)
    return out


class BracketEngine:
    """Graded double bracket of degree ``d`` extended from letter pairs.

    ``gen(l1, l2)`` returns the value on two letters that are not inverse
    letters, as a dict from word pairs to coefficients.
    """

    def __init__(self, q: Quiver, gen: GenFn, d: int = 0):
        self.q, self.gen, self.d = q, gen, d
        self._letters: dict = {}
        self._words: dict = {}

    def _sign(self, a: int, b: int) -> int:
        return -1 if a % 2 and b % 2 else 1

    def letters(self, l1, l2) -> dict:
        key = (l1, l2)
        hit = self._letters.get(key)
        if hit is not None:
            return hit
        q, d = self.q, self.d
        if l1[0] == VERTEX or l2[0] == VERTEX:
            res: dict = {}
        elif l2[0] == INVERSE:
            c = l2[1]
            cs = q.partner(c)
            inner = outer_right(q, self.letters(l1, (ARROW, c)), ((ARROW, cs),))
            for k, v in outer_left(q, ((ARROW, c),), self.letters(l1, (ARROW, cs))).items():
                add_into(inner, k, v)
            s = (l2,)
            res = {}
            for k, v in outer_right(q, outer_left(q, s, inner), s).items():
                add_into(res, k, -v)
        elif l1[0] == INVERSE:
            res = self._antisym(self.letters(l2, l1), d, (1 if l2[0] >= 2 else 0) + d)
        else:
            res = self.gen(l1, l2)
        self._letters[key] = res
        return res

    def _antisym(self, terms: dict, da: int, db: int) -> dict:
        """{{a,b}} = -(-1)^{(|a|+d)(|b|+d)} sigma_(12) {{b,a}}."""
        return swap_terms(terms, True, -self._sign(da, db))

    def words(self, u, v) -> dict:
        """{{u, v}} for two words."""
        if u[0][0] == VERTEX or v[0][0] == VERTEX:
            return {}
        key = (u, v)
        hit = self._words.get(key)
        if hit is not None:
            return hit
        q, d = self.q, self.d
        if len(u) > 1 and len(v) == 1:
            du, dv = word_degree(u) + d, word_degree(v) + d
            res = swap_terms(self.words(v, u), True, -self._sign(du, dv))
        else:
            res = {}
            shift = word_degree(u) + d
            pre_deg = 0
            for k, lt in enumerate(v):
                if len(u) == 1:
                    part = self.letters(u[0], lt)
                else:
                    part = self.words(u, (lt,))
                if part:
                    sign = self._sign(shift, pre_deg)
                    if k:
                        part = outer_left(q, v[:k], part)
                    if k + 1 < len(v):
                        part = outer_right(q, part, v[k + 1:])
                    for kk, c in part.items():
                        add_into(res, kk, c * sign)
                pre_deg += 1 if lt[0] >= 2 else 0
        self._words[key] = res
        return res

    def terms(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for u, a in x.items():
            for v, b in y.items():
                for k, c in self.words(u, v).items():
                    add_into(out, k, a * b * c)
        return out

    def left_terms(self, x: Mapping, t: Mapping, slot: int = 0) -> dict:
        """{{x, -}} applied to factor ``slot`` of a tensor, in place."""
        out: dict = {}
        for key, c in t.items():
            w = key[slot]
            for u, a in x.items():
                for bk, b in self.words(u, w).items():
                    add_into(out, key[:slot] + bk + key[slot + 1:], a * b * c)
        return out

    def bracket(self, x: Element, y: Element, localize: bool = True) -> Tensor:
        if x.quiver is not self.q and x.quiver != self.q:
            raise MixedQuiverError("operand over a different quiver")
        if y.quiver is not self.q and y.quiver != self.q:
            raise MixedQuiverError("operand over a different quiver")
        t = Tensor._raw(self.q, 2, self.terms(x.terms, y.terms))
        return localize_normal_form(t) if localize else t

    def single(self, x: Element, y: Element) -> Element:
        return localize_normal_form(self.bracket(x, y, False).multiply_out())

    def triple(self, a: Element, b: Element, c: Element, graded: bool = False) -> Tensor:
        """{{a,{{b,c}}}}_L + sigma_(123){{b,{{c,a}}}}_L + sigma_(132){{c,{{a,b}}}}_L.

        In the graded case the second and third summands carry the signs
        (-1)^{(|a|+d)(|b|+|c|)} and (-1)^{(|c|+d)(|a|+|b|)}.
        """
        q, d = self.q, self.d
        s2 = s3 = 1
        if graded:
            da, db, dc = a.degree(), b.degree(), c.degree()
            s2 = self._sign(da + d, db + dc)
            s3 = self._sign(dc + d, da + db)
        total: dict = {}
        for x, y, z, perm, sign in ((a, b, c, (0, 1, 2), 1), (b, c, a, CYC3, s2),
                                    (c, a, b, CYC3_INV, s3)):
            nested = self.left_terms(x.terms, self.terms(y.terms, z.terms))
            for key, cf in nested.items():
                ps, nk = permute_key(perm, key, graded)
                add_into(total, nk, cf * ps * sign)
        return localize_normal_form(Tensor._raw(q, 3, total))


class DoubleBracketTable:
    """A degree-0 double bracket on a (localized) path algebra given on arrows.

    ``values`` maps ordered arrow-id pairs to tensors.  Missing pairs are
    filled in from antisymmetry, or set to zero when neither order is given.
    """

    degree = 0

    def __init__(self, q: Quiver, values: Mapping | None = None):
        self.quiver = q
        table: dict = {}
        for (a, b), v in (values or {}).items():
            i, j = q.arrow_index(a), q.arrow_index(b)
            if not isinstance(v, Tensor):
                raise TypeError("table values must be tensors")
            if v.arity != 2:
                raise ValueError("double bracket values have arity 2")
            if v.quiver is not q and v.quiver != q:
                raise MixedQuiverError("value over a different quiver")
            self._check_value(i, j, v)
            table[(i, j)] = v.terms
        for (i, j), t in list(table.items()):
            flipped = swap_terms(t, False, -1)
            other = table.get((j, i))
            if other is None:
                table[(j, i)] = flipped
            elif other != flipped:
                a, b = q.arrows[i].id, q.arrows[j].id
                raise ValueError(f"values for ({a},{b}) and ({b},{a}) are not antisymmetric")
        self._table = table
        self.engine = BracketEngine(q, self._gen, 0)

    def _check_value(self, i: int, j: int, v: Tensor) -> None:
        q = self.quiver
        for (u, w) in v.terms:
            ok = (q.ends(u[0])[0] == q.tail(j) and q.ends(u[-1])[1] == q.head(i)
                  and q.ends(w[0])[0] == q.tail(i) and q.ends(w[-1])[1] == q.head(j))
            if not ok or any(x[0] >= 2 for x in u + w):
                raise ValueError(
                    f"value of ({q.arrows[i].id},{q.arrows[j].id}) is not in "
                    "e_t(b) A e_h(a) (x) e_t(a) A e_h(b)")

    def _gen(self, l1, l2) -> dict:
        if l1[0] != ARROW or l2[0] != ARROW:
            raise QuiverError("algebra brackets only accept arrows and inverse letters")
        return self._table.get((l1[1], l2[1]), {})

    @classmethod
    def from_function(cls, q: Quiver, fn: Callable[[str, str], Tensor]) -> "DoubleBracketTable":
        vals = {}
        for a in q.arrows:
            for b in q.arrows:
                vals[(a.id, b.id)] = fn(a.id, b.id)
        return cls(q, vals)

    def value(self, a: str, b: str) -> Tensor:
        q = self.quiver
        t = self._table.get((q.arrow_index(a), q.arrow_index(b)), {})
        return Tensor._raw(q, 2, dict(t))

    def items(self) -> Iterable:
        q = self.quiver
        for (i, j) in sorted(self._table):
            if i <= j and self._table[(i, j)]:
                yield q.arrows[i].id, q.arrows[j].id, Tensor._raw(q, 2, self._table[(i, j)])

    def generators(self) -> list:
        return [Element._raw(self.quiver, {(l,): Fraction(1)})
                for l in self.quiver.letters((ARROW, INVERSE))]

    def __eq__(self, other):
        return isinstance(other, DoubleBracketTable) and self.quiver == other.quiver \
            and {k: v for k, v in self._table.items() if v} == \
            {k: v for k, v in other._table.items() if v}


def _check_table(T) -> None:
    if not isinstance(T, DoubleBracketTable):
        raise TypeError("expected a DoubleBracketTable")


def evaluate_double_bracket(T: DoubleBracketTable, x: Element, y: Element) -> Tensor:
    _check_table(T)
    return T.engine.bracket(x, y)


def triple_bracket(T: DoubleBracketTable, a: Element, b: Element, c: Element) -> Tensor:
    _check_table(T)
    for z in (a, b, c):
        if z.quiver is not T.quiver and z.quiver != T.quiver:
            raise MixedQuiverError("operand over a different quiver")
    return T.engine.triple(a, b, c)


def single_bracket(T: DoubleBracketTable, x: Element, y: Element) -> Element:
    _check_table(T)
    return T.engine.single(x, y)


def _fmt_triple(a, b, c) -> str:
    return f"({a}, {b}, {c})"


def check_double_poisson(T: DoubleBracketTable) -> CheckResult:
    """Triple bracket on all generator triples, inverse letters included."""
    res = CheckResult("double-poisson")
    gens = T.generators()
    for a in gens:
        for b in gens:
            for c in gens:
                r = triple_bracket(T, a, b, c)
                res.checked += 1
                if r:
                    res.fail(_fmt_triple(a, b, c), str(r))
    return res


def check_quasi_poisson(T: DoubleBracketTable, fallback: bool = True,
                        **oracle) -> CheckResult:
    """{{a,b,c}} = 1/12 sum_i {{a,b,c}}_{E_i^3} on all generator triples."""
    from .polyvectors import bracket_from_polyvector, gauge_element

    q = T.quiver
    res = CheckResult("quasi-poisson")
    cube = Element.zero(q)
    for v in q.vertices:
        E = gauge_element(q, v)
        cube = cube + E * E * E
    rhs_bracket = bracket_from_polyvector(cube) if cube else None
    gens = T.generators()
    for a in gens:
        for b in gens:
            for c in gens:
                lhs = triple_bracket(T, a, b, c)
                rhs = rhs_bracket(a, b, c).scale(Fraction(1, 12)) if rhs_bracket \
                    else Tensor.zero(q, 3)
                res.checked += 1
                if lhs == rhs:
                    continue
                if fallback:
                    from .repspace import tensors_equal
                    ok, info = tensors_equal(lhs, rhs, **oracle)
                    if ok:
                        res.weaken(info)
                        continue
                res.fail(_fmt_triple(a, b, c), str(lhs - rhs))
    return res


def check_loday(T: DoubleBracketTable, samples: Iterable) -> CheckResult:
    """{a,{b,c}} = {{a,b},c} + {b,{a,c}} on each sample triple."""
    res = CheckResult("loday")
    for a, b, c in samples:
        lhs = single_bracket(T, a, single_bracket(T, b, c))
        rhs = single_bracket(T, single_bracket(T, a, b), c) + \
            single_bracket(T, b, single_bracket(T, a, c))
        res.checked += 1
        if lhs != rhs:
            res.fail(_fmt_triple(a, b, c), str(lhs - rhs))
    return res


def loday_tensor_residual(T: DoubleBracketTable, a: Element, b: Element, c: Element) -> Tensor:
    """{a,{{b,c}}} - {{{a,b},c}} - {{b,{a,c}}} - (m(x)1){{a,b,c}} + (1(x)m){{b,a,c}}.

    {a,-} acts on a tensor as a derivation: {a, u (x) v} = {a,u} (x) v + u (x) {a,v}.
    """
    q = T.quiver
    eng = T.engine
    bc = eng.terms(b.terms, c.terms)
    lhs: dict = {}
    single_a = {}
    for (u, v), cf in bc.items():
        for w in (u, v):
            if w not in single_a:
                single_a[w] = single_bracket(T, a, Element._raw(q, {w: Fraction(1)})).terms
        for w, x in single_a[u].items():
            add_into(lhs, (w, v), cf * x)
        for w, x in single_a[v].items():
            add_into(lhs, (u, w), cf * x)
    t = Tensor._raw(q, 2, localize_terms_tensor(q, lhs))
    t = t - evaluate_double_bracket(T, single_bracket(T, a, b), c) \
        - evaluate_double_bracket(T, b, single_bracket(T, a, c))
    abc = triple_bracket(T, a, b, c)
    bac = triple_bracket(T, b, a, c)
    t = t - _partial_multiply(abc, 0) + _partial_multiply(bac, 1)
    return localize_normal_form(t)


def localize_terms_tensor(q: Quiver, terms: dict) -> dict:
    return localize_normal_form(Tensor._raw(q, 2, terms)).terms


def _partial_multiply(t: Tensor, slot: int) -> Tensor:
    """Multiply factors slot and slot+1 of a 3-tensor."""
    q = t.quiver
    out: dict = {}
    for key, c in t.terms.items():
        w = concat(q, key[slot], key[slot + 1])
        if w is not None:
            add_into(out, key[:slot] + (w,) + key[slot + 2:], c)
    return localize_normal_form(Tensor._raw(q, 2, out))
