"""Noncommutative differential forms: d, contractions, Lie derivatives,
the Koszul bracket, bi-symplectic forms and the Sigma map.

Forms live in the same word algebra as everything else; ``d(a)`` is the
differential letter of the arrow ``a``, of degree 1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import sympy

from .brackets import (BracketEngine, DoubleBracketTable, outer_left,
                       outer_right, swap_terms)
from .core import (ARROW, DERIVATION, DIFFERENTIAL, INVERSE, SWAP, VERTEX,
                   Element, MixedQuiverError, Quiver, QuiverError, Tensor,
                   add_into, apply_permutation, concat, localize_normal_form,
                   necklace_normal_form, word_degree)
from .polyvectors import (factor_on_letter, gauge_element, hamiltonian_field,
                          schouten_double_bracket, schouten_single,
                          split_factors)
from .report import CheckResult


class UnsupportedFormError(ValueError):
    """The form is outside the generator-to-single-letter inversion pattern."""


def _same_quiver(x, y) -> None:
    if x.quiver is not y.quiver and x.quiver != y.quiver:
        raise MixedQuiverError("operands live over different quivers")


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# -- d --------------------------------------------------------------------

def _d_letter(q: Quiver, l) -> dict:
    k, i = l
    if k == ARROW:
        return {((DIFFERENTIAL, i),): Fraction(1)}
    if k == INVERSE:
        # d(s) = -s (dc c* + c dc*) s for s = (e + c c*)^{-1}
        cs = q.partner(i)
        return {(l, (DIFFERENTIAL, i), (ARROW, cs), l): Fraction(-1),
                (l, (ARROW, i), (DIFFERENTIAL, cs), l): Fraction(-1)}
    if k == DERIVATION:
        raise ValueError("d is not defined on poly-vector letters")
    return {}


def _d_word(q: Quiver, w) -> dict:
    out: dict = {}
    if w[0][0] == VERTEX:
        return out
    pre = 0
    for k, l in enumerate(w):
        for mid, c in _d_letter(q, l).items():
            add_into(out, w[:k] + mid + w[k + 1:], c * _sign(pre))
        pre += 1 if l[0] >= DERIVATION else 0
    return out


def _d_terms(q: Quiver, terms: Mapping) -> dict:
    out: dict = {}
    for w, c in terms.items():
        for nw, v in _d_word(q, w).items():
            add_into(out, nw, c * v)
    return out


def _d_tensor_terms(q: Quiver, terms: Mapping) -> dict:
    """d(u (x) v) = du (x) v + (-1)^|u| u (x) dv, and likewise for any arity."""
    out: dict = {}
    for key, c in terms.items():
        pre = 0
        for k, w in enumerate(key):
            for nw, v in _d_word(q, w).items():
                add_into(out, key[:k] + (nw,) + key[k + 1:], c * v * _sign(pre))
            pre += word_degree(w)
    return out


def differential(x):
    """The de Rham differential on forms or on tensors of forms."""
    q = x.quiver
    if isinstance(x, Tensor):
        return localize_normal_form(Tensor._raw(q, x.arity, _d_tensor_terms(q, x.terms)))
    return localize_normal_form(Element._raw(q, _d_terms(q, x.terms)))


# -- contractions and Lie derivatives -------------------------------------

def _require_grade1(delta: Element) -> None:
    for w in delta.terms:
        if sum(1 for l in w if l[0] == DERIVATION) != 1 or \
                any(l[0] == DIFFERENTIAL for l in w):
            raise ValueError("expected a grade-1 poly-vector")


def _values_on_letter(delta: Element, letter) -> dict:
    """delta(l) for an arrow or inverse letter, as word-pair terms."""
    q = delta.quiver
    out: dict = {}
    for w, c in delta.terms.items():
        for kk, v in factor_on_letter(q, split_factors(w)[0], letter).items():
            add_into(out, kk, c * v)
    return out


def _derive(x: Element, on_letter, odd: bool) -> dict:
    """Extend a double derivation (odd: degree -1) from its letter values."""
    q = x.quiver
    out: dict = {}
    memo: dict = {}
    for w, c in x.terms.items():
        if w[0][0] == VERTEX:
            continue
        pre = 0
        for k, l in enumerate(w):
            if l not in memo:
                memo[l] = on_letter(l)
            part = memo[l]
            if part:
                s = _sign(pre) if odd else 1
                if k:
                    part = outer_left(q, w[:k], part)
                if k + 1 < len(w):
                    part = outer_right(q, part, w[k + 1:])
                for kk, v in part.items():
                    add_into(out, kk, c * v * s)
            pre += 1 if l[0] >= DERIVATION else 0
    return out


def circ(t: Tensor) -> Element:
    """c1 (x) c2 -> (-1)^{|c1||c2|} c2 c1."""
    if t.arity != 2:
        raise ValueError("circ needs a 2-tensor")
    q = t.quiver
    out: dict = {}
    for (u, v), c in t.terms.items():
        w = concat(q, v, u)
        if w is not None:
            add_into(out, w, c * _sign(word_degree(u) * word_degree(v)))
    return localize_normal_form(Element._raw(q, out))


def contract(delta: Element, x: Element, variant: str = "i"):
    """i_delta(x) as a 2-tensor, or the form  ı_delta(x) = °i_delta(x)  for variant "ı"."""
    _same_quiver(delta, x)
    _require_grade1(delta)
    q = x.quiver

    def on_letter(l):
        if l[0] == DIFFERENTIAL:
            return _values_on_letter(delta, (ARROW, l[1]))
        if l[0] == DERIVATION:
            raise ValueError("contraction is defined on forms only")
        return {}

    t = localize_normal_form(Tensor._raw(q, 2, _derive(x, on_letter, True)))
    if variant == "i":
        return t
    if variant in ("ı", "ii", "circ"):
        return circ(t)
    raise ValueError("variant must be 'i' or 'ı'")


def lie_derivative(delta: Element, x: Element, variant: str = "L"):
    """L_delta(x) as a 2-tensor, or 𝓛_delta(x) = °L_delta(x) for variant "𝓛"."""
    _same_quiver(delta, x)
    _require_grade1(delta)
    q = x.quiver

    def on_letter(l):
        k, i = l
        if k in (ARROW, INVERSE):
            return _values_on_letter(delta, l)
        if k == DIFFERENTIAL:
            return _d_tensor_terms(q, _values_on_letter(delta, (ARROW, i)))
        if k == DERIVATION:
            raise ValueError("Lie derivatives are taken of forms only")
        return {}

    t = localize_normal_form(Tensor._raw(q, 2, _derive(x, on_letter, False)))
    if variant == "L":
        return t
    if variant in ("𝓛", "LL", "circ"):
        return circ(t)
    raise ValueError("variant must be 'L' or '𝓛'")


def split_lr(t: Tensor) -> tuple:
    """Split a tensor of poly-vectors into the parts with D letters on the left / right."""
    q = t.quiver
    left: dict = {}
    right: dict = {}
    for (u, v), c in t.terms.items():
        gu = any(l[0] == DERIVATION for l in u)
        gv = any(l[0] == DERIVATION for l in v)
        if gu and not gv:
            left[(u, v)] = c
        elif gv and not gu:
            right[(u, v)] = c
        elif gu or gv:
            raise ValueError("both factors carry derivation letters")
    return Tensor._raw(q, 2, left), Tensor._raw(q, 2, right)


def cartan_residual(delta: Element, x: Element) -> Element:
    """𝓛_delta x - d ı_delta x - ı_delta d x."""
    return lie_derivative(delta, x, "𝓛") - differential(contract(delta, x, "ı")) \
        - contract(delta, differential(x), "ı")


def contraction_antisymmetry_residual(delta: Element, Delta: Element, x: Element) -> Tensor:
    """i_delta ı_Delta x + sigma_(12) i_Delta ı_delta x."""
    a = contract(delta, contract(Delta, x, "ı"), "i")
    b = contract(Delta, contract(delta, x, "ı"), "i")
    return a + apply_permutation(SWAP, b, signed=True)


def contraction_lie_residual(delta: Element, Delta: Element, x: Element) -> Tensor:
    """i_delta 𝓛_Delta x - sigma_(12) L_Delta ı_delta x minus the
    ı_{X'_l}(x) (x) X''_l + X'_r (x) ı_{X''_r}(x) terms, X = {{delta, Delta}}."""
    q = x.quiver
    lhs = contract(delta, lie_derivative(Delta, x, "𝓛"), "i") - \
        apply_permutation(SWAP, lie_derivative(Delta, contract(delta, x, "ı"), "L"), signed=True)
    left, right = split_lr(schouten_double_bracket(delta, Delta))
    rhs: dict = {}
    for (u, v), c in left.terms.items():
        for w, cw in contract(Element._raw(q, {u: Fraction(1)}), x, "ı").terms.items():
            add_into(rhs, (w, v), c * cw)
    for (u, v), c in right.terms.items():
        for w, cw in contract(Element._raw(q, {v: Fraction(1)}), x, "ı").terms.items():
            add_into(rhs, (u, w), c * cw)
    return lhs - localize_normal_form(Tensor._raw(q, 2, rhs))


# -- Koszul bracket ---------------------------------------------------------

def _koszul_gen(T: DoubleBracketTable):
    q = T.quiver

    def gen(l1, l2):
        k1, k2 = l1[0], l2[0]
        if DERIVATION in (k1, k2):
            raise QuiverError("the Koszul bracket is defined on forms only")
        base = T._gen((ARROW, l1[1]), (ARROW, l2[1]))
        if k1 == ARROW and k2 == ARROW:
            return {}
        if k1 == DIFFERENTIAL and k2 == DIFFERENTIAL:
            return _d_tensor_terms(q, base)
        return dict(base)
    return gen


def koszul_engine(T: DoubleBracketTable) -> BracketEngine:
    eng = getattr(T, "_koszul", None)
    if eng is None:
        eng = BracketEngine(T.quiver, _koszul_gen(T), -1)
        T._koszul = eng
    return eng


def koszul_bracket(T: DoubleBracketTable, x: Element, y: Element) -> Tensor:
    _same_quiver(x, y)
    if x.quiver is not T.quiver and x.quiver != T.quiver:
        raise MixedQuiverError("operands live over a different quiver than the table")
    return koszul_engine(T).bracket(x, y)


def koszul_d_residual(T: DoubleBracketTable, x: Element, y: Element) -> Tensor:
    """d{{x,y}} - {{dx,y}} - (-1)^{|x|-1}{{x,dy}} for homogeneous x."""
    s = _sign(x.degree() - 1)
    return differential(koszul_bracket(T, x, y)) - koszul_bracket(T, differential(x), y) \
        - koszul_bracket(T, x, differential(y)).scale(s)


# -- Sigma ------------------------------------------------------------------

def sigma_map(T: DoubleBracketTable, x: Element) -> Element:
    """The algebra map Omega -> D_B A fixing A and sending da to H_a."""
    q = T.quiver
    _same_quiver(x, Element.zero(q))
    fields: dict = {}
    out = Element.zero(q)
    for w, c in x.terms.items():
        if w[0][0] == VERTEX:
            out = out + Element._raw(q, {w: c})
            continue
        acc = Element._raw(q, {((VERTEX, q.ends(w[0])[0]),): c})
        for l in w:
            if l[0] == DIFFERENTIAL:
                if l[1] not in fields:
                    fields[l[1]] = hamiltonian_field(T, Element._raw(q, {((ARROW, l[1]),):
                                                                       Fraction(1)}))
                acc = acc * fields[l[1]]
            elif l[0] == DERIVATION:
                raise ValueError("Sigma is defined on forms only")
            else:
                acc = acc * Element._raw(q, {(l,): Fraction(1)})
        out = out + acc
    return localize_normal_form(out)


# -- bi-symplectic forms ----------------------------------------------------

def standard_bisymplectic(q: Quiver) -> Element:
    """omega = sum_{a in Q} da* da; its bivector is sum D(a) D(a*)."""
    if not q.doubled:
        raise QuiverError("the standard form needs a doubled quiver")
    out: dict = {}
    for i in q.base_arrows:
        add_into(out, ((DIFFERENTIAL, q.partner(i)), (DIFFERENTIAL, i)), Fraction(1))
    return Element._raw(q, out)


def inverse_contraction(omega: Element) -> dict:
    """psi on differential letters: arrow index j -> grade-1 element with ı_psi(dj) omega = dj."""
    q = omega.quiver
    if not omega or omega.degrees() != {2}:
        raise UnsupportedFormError("omega must be a nonzero form of degree 2")
    if any(l[0] == DERIVATION for w in omega.terms for l in w):
        raise UnsupportedFormError("omega may not contain derivation letters")
    psi: dict = {}
    for i in range(len(q.arrows)):
        img = contract(Element._raw(q, {((DERIVATION, i),): Fraction(1)}), omega, "ı")
        if len(img.terms) != 1:
            raise UnsupportedFormError(
                f"contraction with D({q.arrows[i].id}) is not a multiple of one differential")
        (w, c), = img.terms.items()
        if len(w) != 1 or w[0][0] != DIFFERENTIAL:
            raise UnsupportedFormError(
                f"contraction with D({q.arrows[i].id}) is not a multiple of one differential")
        j = w[0][1]
        if j in psi:
            raise UnsupportedFormError("omega is not bi-non-degenerate")
        psi[j] = Element._raw(q, {((DERIVATION, i),): 1 / c})
    if len(psi) != len(q.arrows):
        raise UnsupportedFormError("omega is not bi-non-degenerate")
    return psi


def _substitute(x: Element, psi: Mapping) -> Element:
    q = x.quiver
    out = Element.zero(q)
    for w, c in x.terms.items():
        acc = Element._raw(q, {((VERTEX, q.ends(w[0])[0]),): c})
        for l in w:
            acc = acc * (psi[l[1]] if l[0] == DIFFERENTIAL else Element._raw(q, {(l,): Fraction(1)}))
        out = out + acc
    return localize_normal_form(out)


def poisson_from_symplectic(omega: Element) -> Element:
    """P = -(psi (x) psi)(omega) with psi the inverse of ı(omega)."""
    return -_substitute(omega, inverse_contraction(omega))


def omega_bracket(omega: Element, a: Element, b: Element) -> Tensor:
    """{{a,b}}_omega = H_a(b) with ı_{H_a} omega = da."""
    psi = inverse_contraction(omega)
    Ha = _substitute(differential(a), psi)
    return contract(Ha, differential(b), "i")


def contract_form(m: Element, P: Element) -> Element:
    """ı_m P for a 1-form m acting on poly-vectors: i_m(D b) = D_b(m)'' (x) D_b(m)'."""
    _same_quiver(m, P)
    q = m.quiver
    if m.degrees() - {1}:
        raise ValueError("m must be a 1-form")

    def on_letter(l):
        if l[0] != DERIVATION:
            if l[0] == DIFFERENTIAL:
                raise ValueError("expected a poly-vector")
            return {}
        f = ((), l[1], ())
        out: dict = {}
        for w, c in m.terms.items():
            k = next(k for k, x in enumerate(w) if x[0] == DIFFERENTIAL)
            part = factor_on_letter(q, f, (ARROW, w[k][1]))
            if k:
                part = outer_left(q, w[:k], part)
            if k + 1 < len(w):
                part = outer_right(q, part, w[k + 1:])
            for kk, v in part.items():
                add_into(out, kk, c * v)
        return swap_terms(out, False)

    return circ(localize_normal_form(Tensor._raw(q, 2, _derive(P, on_letter, True))))


def closed_words(q: Quiver, v: int, max_len: int = 2) -> list:
    """Closed paths at v over arrow letters, of length 1..max_len."""
    words = [((ARROW, i),) for i in range(len(q.arrows)) if q.tail(i) == v]
    out = [w for w in words if q.head(w[0][1]) == v]
    frontier = words
    for _ in range(max_len - 1):
        nxt = []
        for w in frontier:
            for i in range(len(q.arrows)):
                if q.tail(i) == q.head(w[-1][1]):
                    nxt.append(w + ((ARROW, i),))
        out += [w for w in nxt if q.head(w[-1][1]) == v]
        frontier = nxt
    return out


def solve_moment(omega: Element, max_len: int = 2) -> Element | None:
    """mu = sum mu_i with d mu_i = ı_{E_i} omega, solved over closed words.

    Free parameters (and the B-constant) are set to zero; None when some
    vertex has no solution in the basis.
    """
    q = omega.quiver
    total = Element.zero(q)
    for v in range(len(q.vertices)):
        target = contract(gauge_element(q, q.vertices[v]), omega, "ı")
        basis = closed_words(q, v, max_len)
        images = [_d_word(q, w) for w in basis]
        rows = sorted(set(target.terms).union(*images), key=repr)
        if not rows:
            continue
        A = sympy.Matrix(len(rows), len(basis),
                         lambda r, c: sympy.Rational(images[c].get(rows[r], 0)))
        b = sympy.Matrix([sympy.Rational(target.terms.get(r, 0)) for r in rows])
        try:
            sol, params = A.gauss_jordan_solve(b)
        except ValueError:
            return None
        sol = sol.subs({p: 0 for p in params})
        for w, c in zip(basis, sol):
            if c:
                total = total + Element._raw(q, {w: Fraction(int(c.p), int(c.q))})
    return total


def check_bisymplectic_equivalence(omega: Element, max_len: int = 2) -> CheckResult:
    """d omega = 0 in DR iff {P,P} = 0 mod commutators, plus the Sigma square
    and the recovered moment map when omega is closed."""
    from .brackets import DoubleBracketTable as _T
    from .polyvectors import bracket_from_polyvector
    from .structures import standard_hamiltonian

    q = omega.quiver
    res = CheckResult("bisymplectic")
    try:
        P = poisson_from_symplectic(omega)
    except UnsupportedFormError as e:
        res.status = "ERROR"
        res.failures.append(("precondition", str(e)))
        return res
    closed = not necklace_normal_form(differential(omega))
    poisson = not necklace_normal_form(schouten_single(P, P))
    res.params.update({"closed": closed, "poisson": poisson})
    res.checked += 1
    if closed != poisson:
        res.fail("equivalence", f"d omega closed={closed} but {{P,P}} vanishes={poisson}")

    T: _T = bracket_from_polyvector(P).table()
    res.checked += 1
    if localize_normal_form(sigma_map(T, omega) + P):
        if necklace_normal_form(sigma_map(T, omega) + P):
            res.fail("Sigma(omega) = -P", str(sigma_map(T, omega) + P))
    for a in q.arrows:
        x = Element.letter(q, a.id)
        for y in (Element.letter(q, b.id) for b in q.arrows):
            res.checked += 1
            if omega_bracket(omega, x, y) != T.engine.bracket(x, y):
                res.fail(f"{{{{{a.id},-}}}}_omega", "differs from the bracket of P")
                break
    if not closed:
        return res
    for a in q.arrows:
        x = Element.letter(q, a.id)
        for g in (x, differential(x)):
            res.checked += 1
            lhs = sigma_map(T, differential(g))
            rhs = -schouten_single(P, sigma_map(T, g))
            if lhs != rhs:
                res.fail(f"Sigma d vs {{P,-}} Sigma on {g}", str(lhs - rhs))
    mu = solve_moment(omega, max_len)
    res.checked += 1
    if mu is None:
        res.fail("moment", "no solution of d mu_i = ı_{E_i} omega in the basis")
    else:
        res.params["moment"] = str(mu)
        if q.doubled and mu != standard_hamiltonian(q).moment:
            res.fail("moment", f"recovered {mu}")
    return res
