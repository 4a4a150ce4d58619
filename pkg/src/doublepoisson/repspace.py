"""Exact evaluation on representation spaces.

Matrices are numpy object arrays of Fractions, of size |alpha| x |alpha|, with
the block of vertex i occupying the rows/columns phi^{-1}(i).  A grade-1
poly-vector delta acts on coordinate functions by
delta_ij(x_uv) = delta(x)'_uj delta(x)''_iv.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np
import sympy

from .brackets import DoubleBracketTable, evaluate_double_bracket, single_bracket
from .core import (ARROW, INVERSE, VERTEX, Element, Quiver, Tensor)
from .polyvectors import (apply_derivation, factor_on_terms, gauge_element,
                          schouten_double_bracket, schouten_single, split_factors)
from .report import CheckResult

ZERO = Fraction(0)
ONE = Fraction(1)

ORACLE_DEFAULTS = {"points": 8, "max_dim": 3, "bound": 7, "seed": 0}


def zeros(*shape) -> np.ndarray:
    return np.full(shape, ZERO, dtype=object)


def exact_inverse(m: np.ndarray):
    """Inverse of a square Fraction matrix, or None when singular."""
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                      for row in m.tolist()])
    if M.det() == 0:
        return None
    inv = M.inv()
    out = zeros(*m.shape)
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            x = inv[i, j]
            out[i, j] = Fraction(int(x.p), int(x.q))
    return out


def is_zero(arr: np.ndarray) -> bool:
    return not any(x != 0 for x in np.asarray(arr).flat)


@dataclass(frozen=True)
class DimVector:
    dims: tuple

    def __post_init__(self):
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise ValueError("dimension vector entries must be positive")

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple:
        out, s = [], 0
        for d in self.dims:
            out.append(s)
            s += d
        return tuple(out)

    def block(self, i: int) -> range:
        o = self.offsets[i]
        return range(o, o + self.dims[i])

    def phi(self, p: int) -> int:
        for i, o in enumerate(self.offsets):
            if o <= p < o + self.dims[i]:
                return i
        raise IndexError(p)


@dataclass
class RepPoint:
    quiver: Quiver
    alpha: DimVector
    letters: dict  # letter -> |alpha| x |alpha| matrix
    seed: object = None
    _words: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return self.alpha.total

    def idempotent(self, i: int) -> np.ndarray:
        m = zeros(self.N, self.N)
        for k in self.alpha.block(i):
            m[k, k] = ONE
        return m

    def identity(self) -> np.ndarray:
        m = zeros(self.N, self.N)
        for k in range(self.N):
            m[k, k] = ONE
        return m

    def word(self, w) -> np.ndarray:
        hit = self._words.get(w)
        if hit is not None:
            return hit
        if w[0][0] == VERTEX:
            m = self.idempotent(w[0][1])
        else:
            for l in w:
                if l not in self.letters:
                    raise ValueError("only degree-0 letters can be evaluated")
            m = self.letters[w[0]]
            for l in w[1:]:
                m = m.dot(self.letters[l])
        self._words[w] = m
        return m


def _rng(seed) -> random.Random:
    """Structured seeds such as tuples go through repr so they stay reproducible."""
    return random.Random(seed if isinstance(seed, (int, str, bytes)) else repr(seed))


def _dims(q: Quiver, alpha) -> DimVector:
    if isinstance(alpha, DimVector):
        d = alpha.dims
    elif isinstance(alpha, Mapping):
        d = tuple(int(alpha[v]) for v in q.vertices)
    else:
        d = tuple(int(x) for x in alpha)
    if len(d) != len(q.vertices):
        raise ValueError("dimension vector length does not match the vertex count")
    return DimVector(d)


def random_point(q: Quiver, alpha, seed=0, bound: int = 7, attempts: int = 100) -> RepPoint:
    """Deterministic random point with entries p/r, |p|, |r| <= bound."""
    dv = _dims(q, alpha)
    rng = _rng(seed)
    N = dv.total
    unit_pairs = {q.arrow_index(u): q.arrow_index(w) for u, w in q.units}
    unit_second = set(unit_pairs.values())

    def entry():
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

    for _ in range(attempts):
        letters = {}
        ok = True
        for i, a in enumerate(q.arrows):
            if i in unit_second:
                continue
            m = zeros(N, N)
            for r in dv.block(q.tail(i)):
                for c in dv.block(q.head(i)):
                    m[r, c] = entry()
            letters[(ARROW, i)] = m
            if i in unit_pairs:
                if dv.dims[q.tail(i)] != dv.dims[q.head(i)]:
                    raise ValueError("unit arrows need equal dimensions at both ends")
                rows, cols = list(dv.block(q.tail(i))), list(dv.block(q.head(i)))
                inv = exact_inverse(m[np.ix_(rows, cols)])
                if inv is None:
                    ok = False
                    break
                mi = zeros(N, N)
                mi[np.ix_(cols, rows)] = inv
                letters[(ARROW, unit_pairs[i])] = mi
        if ok:
            for name in q.inverted:
                i = q.arrow_index(name)
                j = q.partner(i)
                blk = list(dv.block(q.tail(i)))
                prod = letters[(ARROW, i)].dot(letters[(ARROW, j)])[np.ix_(blk, blk)]
                for k in range(len(blk)):
                    prod[k, k] += ONE
                inv = exact_inverse(prod)
                if inv is None:
                    ok = False
                    break
                m = zeros(N, N)
                m[np.ix_(blk, blk)] = inv
                letters[(INVERSE, i)] = m
        if ok:
            return RepPoint(q, dv, letters, seed)
    raise RuntimeError(f"no nonsingular point found after {attempts} attempts")


def conjugate_point(p: RepPoint, seed=0, bound: int = 3) -> RepPoint:
    """g . p with X(a) -> g_t X(a) g_h^{-1} for a random block-diagonal g."""
    rng = _rng(seed)
    N, dv = p.N, p.alpha
    while True:
        g = zeros(N, N)
        for i in range(len(dv.dims)):
            for r in dv.block(i):
                for c in dv.block(i):
                    g[r, c] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        gi = exact_inverse(g)
        if gi is not None:
            break
    letters = {l: g.dot(m).dot(gi) for l, m in p.letters.items()}
    return RepPoint(p.quiver, dv, letters, ("conj", p.seed, seed))


# -- evaluation -----------------------------------------------------------

def evaluate_element(x: Element, p: RepPoint) -> np.ndarray:
    out = zeros(p.N, p.N)
    for w, c in x.terms.items():
        out = out + p.word(w) * c
    return out


def evaluate_tensor(t: Tensor, p: RepPoint) -> np.ndarray:
    """sum c X(w1) (x) ... (x) X(wk) as a 2k-index array."""
    shape = (p.N,) * (2 * t.arity)
    out = zeros(*shape)
    for key, c in t.terms.items():
        m = p.word(key[0])
        for w in key[1:]:
            m = np.multiply.outer(m, p.word(w))
        out = out + m * c
    return out


def pair_array(terms: Mapping, p: RepPoint) -> np.ndarray:
    """B[i,j,u,v] = sum c X(x')_{uj} X(x'')_{iv}."""
    out = zeros(p.N, p.N, p.N, p.N)
    for (u, v), c in terms.items():
        out = out + np.einsum("uj,iv->ijuv", p.word(u), p.word(v)) * c
    return out


def _sample_dims(q: Quiver, rng: random.Random, max_dim: int) -> tuple:
    return tuple(rng.randint(1, max_dim) for _ in q.vertices)


def tensors_equal(x, y, points: int = 8, max_dim: int = 3, bound: int = 7, seed: int = 0):
    """Probabilistic equality of two elements or tensors by point evaluation."""
    q = x.quiver
    rng = _rng(seed)
    diff = x - y
    info = {"points": points, "max_dim": max_dim, "bound": bound, "seed": seed}
    for k in range(points):
        dims = _sample_dims(q, rng, max_dim)
        p = random_point(q, dims, seed=(seed, k), bound=bound)
        val = evaluate_tensor(diff, p) if isinstance(diff, Tensor) else evaluate_element(diff, p)
        if not is_zero(val):
            info["witness"] = {"dims": list(dims), "point": k}
            return False, info
    return True, info


elements_equal = tensors_equal


def layered_equal(x, y, fallback: bool = True, **oracle):
    """('PROVED'|'PROBABLE'|'FAIL', info) after normal forms, then sampling."""
    from .core import localize_normal_form
    if localize_normal_form(x) == localize_normal_form(y):
        return "PROVED", {}
    if not fallback:
        return "FAIL", {}
    ok, info = tensors_equal(x, y, **{**ORACLE_DEFAULTS, **oracle})
    return ("PROBABLE" if ok else "FAIL"), info


# -- induced brackets -------------------------------------------------------

def induced_bracket_tensor(T: DoubleBracketTable, a: Element, b: Element,
                           p: RepPoint) -> np.ndarray:
    return pair_array(evaluate_double_bracket(T, a, b).terms, p)


def _word_el(q: Quiver, w) -> Element:
    return Element._raw(q, {w: ONE})


def _nested(T: DoubleBracketTable, a: Element, b: Element, c: Element,
            p: RepPoint) -> np.ndarray:
    """{a_pq, {b_rs, c_uv}} as N[p,q,r,s,u,v]."""
    q = T.quiver
    n = p.N
    out = zeros(n, n, n, n, n, n)
    for (x, y), cf in evaluate_double_bracket(T, b, c).terms.items():
        Bx = induced_bracket_tensor(T, a, _word_el(q, x), p)
        By = induced_bracket_tensor(T, a, _word_el(q, y), p)
        X, Y = p.word(x), p.word(y)
        out = out + (np.einsum("pqus,rv->pqrsuv", Bx, Y)
                     + np.einsum("us,pqrv->pqrsuv", X, By)) * cf
    return out


def jacobi_residual(T: DoubleBracketTable, a: Element, b: Element, c: Element,
                    p: RepPoint) -> tuple:
    """(LHS - RHS, LHS) of the Jacobi identity on Rep, as 6-index arrays."""
    from .brackets import triple_bracket
    lhs = _nested(T, a, b, c, p)
    lhs = lhs + np.transpose(_nested(T, b, c, a, p), (4, 5, 0, 1, 2, 3))
    lhs = lhs + np.transpose(_nested(T, c, a, b, p), (2, 3, 4, 5, 0, 1))
    n = p.N
    rhs = zeros(n, n, n, n, n, n)
    for (x, y, z), cf in triple_bracket(T, a, b, c).terms.items():
        rhs = rhs + np.einsum("uq,ps,rv->pqrsuv", p.word(x), p.word(y), p.word(z)) * cf
    for (x, y, z), cf in triple_bracket(T, a, c, b).terms.items():
        rhs = rhs - np.einsum("rq,pv,us->pqrsuv", p.word(x), p.word(y), p.word(z)) * cf
    return lhs - rhs, lhs


def lie_poisson_tensor(p: RepPoint, t: Element) -> np.ndarray:
    """t_uj delta_iv - delta_uj t_iv."""
    X = evaluate_element(t, p)
    I = p.identity()
    return np.einsum("uj,iv->ijuv", X, I) - np.einsum("uj,iv->ijuv", I, X)


# -- poly-vectors on Rep ----------------------------------------------------

def _factor_array(q: Quiver, f, x: Element, p: RepPoint) -> np.ndarray:
    """A[i,j,u,v] = delta_ij(x_uv) for a single grade-1 factor."""
    return pair_array(factor_on_terms(q, f, x.terms), p)


def derivation_array(delta: Element, x: Element, p: RepPoint) -> np.ndarray:
    """delta_ij(x_uv) for a grade-1 poly-vector delta."""
    return pair_array(apply_derivation(delta, x).terms, p)


def evaluate_polyvector_action(P: Element, coords: Sequence, p: RepPoint,
                               indices: tuple | None = None) -> Fraction:
    """Apply P to coordinate functions x_uv given as (x, (u, v)) pairs.

    With ``indices`` = (i, j) and P of grade 1 this is P_ij(x_uv); otherwise
    the trace tr(P) = sum delta1_{i1 i2} ... deltan_{in i1} is applied, with the
    usual alternating sum over the order of the arguments.
    """
    q = P.quiver
    grades = P.grades()
    n = grades.pop() if grades else len(coords)
    if grades or n != len(coords):
        raise ValueError("grade of P does not match the number of coordinates")
    if indices is not None:
        if n != 1:
            raise ValueError("entry indices are only meaningful for grade 1")
        (x, (u, v)), (i, j) = coords[0], indices
        return derivation_array(P, x, p)[i, j, u, v]
    total = ZERO
    for w, c in P.terms.items():
        fs = split_factors(w)
        cache = {}
        for sigma in permutations(range(n)):
            sign = _perm_sign(sigma)
            mats = []
            for k, f in enumerate(fs):
                x, (u, v) = coords[sigma[k]]
                key = (k, sigma[k])
                if key not in cache:
                    cache[key] = _factor_array(q, f, x, p)
                mats.append(cache[key][:, :, u, v])
            m = mats[0]
            for mm in mats[1:]:
                m = m.dot(mm)
            total += c * sign * sum(m[k, k] for k in range(p.N))
    return total


def _perm_sign(s) -> int:
    sign = 1
    s = list(s)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def vector_field_commutator_residual(P: Element, Q: Element, a: Element, p: RepPoint) -> np.ndarray:
    """[P_ij, Q_uv](a_pq) - ({{P,Q}}'_uj {{P,Q}}''_iv)(a_pq) as R[i,j,u,v,p,q]."""
    q = P.quiver
    n = p.N
    lhs = zeros(n, n, n, n, n, n)
    for (x, y), cf in apply_derivation(Q, a).terms.items():
        Dx = derivation_array(P, _word_el(q, x), p)
        Dy = derivation_array(P, _word_el(q, y), p)
        lhs = lhs + (np.einsum("ijpv,uq->ijuvpq", Dx, p.word(y))
                     + np.einsum("pv,ijuq->ijuvpq", p.word(x), Dy)) * cf
    for (x, y), cf in apply_derivation(P, a).terms.items():
        Dx = derivation_array(Q, _word_el(q, x), p)
        Dy = derivation_array(Q, _word_el(q, y), p)
        lhs = lhs - (np.einsum("uvpj,iq->ijuvpq", Dx, p.word(y))
                     + np.einsum("pj,uviq->ijuvpq", p.word(x), Dy)) * cf
    rhs = zeros(n, n, n, n, n, n)
    for (x, y), cf in schouten_double_bracket(P, Q).terms.items():
        gx = sum(1 for l in x if l[0] == 2)
        if gx == 1:
            D = derivation_array(_word_el(q, x), a, p)
            rhs = rhs + np.einsum("ujpq,iv->ijuvpq", D, p.word(y)) * cf
        else:
            D = derivation_array(_word_el(q, y), a, p)
            rhs = rhs + np.einsum("uj,ivpq->ijuvpq", p.word(x), D) * cf
    return lhs - rhs


# -- checks -------------------------------------------------------------------

def _trace(m: np.ndarray) -> Fraction:
    return sum((m[k, k] for k in range(m.shape[0])), ZERO)


def trace_checks(T: DoubleBracketTable | None, a: Element, b: Element,
                 p: RepPoint) -> CheckResult:
    """{tr a, tr b} = tr {a, b}; with T None, the Schouten version on grade-1 a, b."""
    res = CheckResult("trace")
    res.params = {"dims": list(p.alpha.dims), "seed": repr(p.seed)}
    res.checked = 1
    if T is not None:
        B = induced_bracket_tensor(T, a, b, p)
        lhs = sum((B[i, i, u, u] for i in range(p.N) for u in range(p.N)), ZERO)
        rhs = _trace(evaluate_element(single_bracket(T, a, b), p))
        if lhs != rhs:
            res.fail(f"({a}, {b})", f"{lhs} != {rhs}")
        return res
    q = a.quiver
    br = schouten_single(a, b)
    for arr in q.arrows:
        x = Element.letter(q, arr.id)
        R = vector_field_commutator_residual(a, b, x, p)
        if not is_zero(R):
            res.fail(f"({a}, {b}) on {arr.id}", "commutator of matrix fields differs from the Schouten bracket")
            continue
        # [tr a, tr b](x_pq) against tr{a,b}(x_pq)
        lhs_full = _commutator_trace(a, b, x, p)
        rhs = np.einsum("iipq->pq", derivation_array(br, x, p)) if br else zeros(p.N, p.N)
        if not is_zero(lhs_full - rhs):
            res.fail(f"({a}, {b}) on {arr.id}", "trace residual nonzero")
    return res


def _commutator_trace(P: Element, Q: Element, a: Element, p: RepPoint) -> np.ndarray:
    """[tr P, tr Q](a_pq) for grade-1 P, Q."""
    q = P.quiver
    n = p.N
    out = zeros(n, n)
    for first, second, sign in ((P, Q, 1), (Q, P, -1)):
        for (x, y), cf in apply_derivation(second, a).terms.items():
            Dx = np.einsum("iipv->pv", derivation_array(first, _word_el(q, x), p))
            Dy = np.einsum("iiuq->uq", derivation_array(first, _word_el(q, y), p))
            # second_jj(a_pq) = x_pj y_jq; first_ii acts by Leibniz, then sum over j
            out = out + (np.einsum("pj,jq->pq", Dx, p.word(y))
                         + np.einsum("pj,jq->pq", p.word(x), Dy)) * (cf * sign)
    return out


def gauge_action_check(q: Quiver, p: RepPoint) -> CheckResult:
    """(E_v)_ij(a_uv) = [X(a), f_ji]_uv when phi(i) = phi(j) = v, else 0."""
    res = CheckResult("gauge-action")
    n = p.N
    for vi, v in enumerate(q.vertices):
        E = gauge_element(q, v)
        for arr in q.arrows:
            x = Element.letter(q, arr.id)
            D = derivation_array(E, x, p) if E else zeros(n, n, n, n)
            X = p.word(((ARROW, q.arrow_index(arr.id)),))
            for i in range(n):
                for j in range(n):
                    on = p.alpha.phi(i) == vi and p.alpha.phi(j) == vi
                    for u in range(n):
                        for w in range(n):
                            expect = ZERO
                            if on:
                                expect = (X[u, j] if i == w else ZERO) - \
                                    (X[i, w] if u == j else ZERO)
                            res.checked += 1
                            if D[i, j, u, w] != expect:
                                res.fail(f"E_{v} {i}{j} on {arr.id}_{u}{w}",
                                         f"{D[i, j, u, w]} != {expect}")
    return res


def quasi_structures_eval(S, p: RepPoint) -> CheckResult:
    """Moment identities of a (quasi-)Hamiltonian structure at one point."""
    q = S.quiver
    T = S.table()
    res = CheckResult(f"rep-moment-{S.kind}")
    res.params = {"dims": list(p.alpha.dims), "seed": repr(p.seed)}
    n = p.N
    if S.kind == "multiplicative":
        Phi = evaluate_element(S.moment, p)
        if exact_inverse(Phi) is None:
            res.fail("X(Phi)", "not invertible")
    for vi, v in enumerate(q.vertices):
        mv = S.moment.corner(v)
        blk = list(p.alpha.block(vi))
        E = gauge_element(q, v)
        for arr in q.arrows:
            x = Element.letter(q, arr.id)
            B = induced_bracket_tensor(T, mv, x, p)  # B[u,v,r,s] = {m_uv, a_rs}
            X = p.word(((ARROW, q.arrow_index(arr.id)),))
            if S.kind == "additive":
                D = derivation_array(E, x, p) if E else zeros(n, n, n, n)
                bad = not is_zero(B - D)
            else:
                M = evaluate_element(mv, p)
                rhs = zeros(n, n, n, n)
                for u in blk:
                    for w in blk:
                        for r in range(n):
                            for s in range(n):
                                acc = ZERO
                                for i in blk:
                                    # [X(a), f_vi]_rs = a_rv d_is - d_rv a_is
                                    acc += M[u, i] * ((X[r, w] if i == s else ZERO)
                                                      - (X[i, s] if r == w else ZERO))
                                    # [X(a), f_iu]_rs = a_ri d_us - d_ri a_us
                                    acc += M[i, w] * ((X[r, i] if u == s else ZERO)
                                                      - (X[u, s] if r == i else ZERO))
                                rhs[u, w, r, s] = acc / 2
                bad = not is_zero(B - rhs)
            res.checked += 1
            if bad:
                res.fail(f"vertex {v}, arrow {arr.id}", "moment identity residual nonzero")
    return res
