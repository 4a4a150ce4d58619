"""Named (quasi-)Hamiltonian structures on doubled quivers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .brackets import DoubleBracketTable, single_bracket
from .core import (ARROW, DERIVATION, INVERSE, Element, Quiver, QuiverError,
                   build_doubled_quiver, localize_normal_form,
                   necklace_normal_form, quiver)
from .parse import format_element, parse_element, quiver_from_dict, quiver_to_dict
from .polyvectors import bracket_from_polyvector

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HamiltonianStructure:
    quiver: Quiver
    P: Element
    moment: Element
    kind: str  # "additive" or "multiplicative"
    order: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("additive", "multiplicative"):
            raise ValueError("kind must be additive or multiplicative")
        if self.P and self.P.grades() != {2}:
            raise ValueError("P must be homogeneous of grade 2")
        if self.kind == "multiplicative" and not self.quiver.inverted:
            raise ValueError("multiplicative structures need inverse letters")

    def table(self) -> DoubleBracketTable:
        return bracket_from_polyvector(self.P).table()

    def component(self, v) -> Element:
        return self.moment.corner(v)

    def to_dict(self) -> dict:
        d = {"quiver": quiver_to_dict(self.quiver), "kind": self.kind,
             "P": format_element(self.P), "moment": format_element(self.moment)}
        if self.order is not None:
            d["order"] = list(self.order)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "HamiltonianStructure":
        q = quiver_from_dict(d["quiver"])
        order = tuple(d["order"]) if d.get("order") else None
        if order is not None:
            q = q.with_order(order)
        P = parse_element(d.get("P", "0"), q)
        m = parse_element(d.get("moment", "0"), q)
        return cls(q, P, m, d.get("kind", "additive"), order)


def _letter(q: Quiver, i: int, kind: int = ARROW) -> Element:
    return Element._raw(q, {((kind, i),): Fraction(1)})


def _require_doubled(q: Quiver) -> None:
    if not q.doubled:
        raise QuiverError("structure needs a doubled quiver")


def standard_hamiltonian(q: Quiver) -> HamiltonianStructure:
    """P = sum_{a in Q} D(a) D(a*), mu = sum_{a in Q} [a, a*]."""
    _require_doubled(q)
    P = Element.zero(q)
    mu = Element.zero(q)
    for i in q.base_arrows:
        j = q.partner(i)
        P = P + _letter(q, i, DERIVATION) * _letter(q, j, DERIVATION)
        a, s = _letter(q, i), _letter(q, j)
        mu = mu + a * s - s * a
    return HamiltonianStructure(q, P, mu, "additive")


def one_pair_quiver() -> Quiver:
    return quiver([1, 2], [("a", 1, 2)], double=True, invert=["a"])


def one_pair_quasi() -> HamiltonianStructure:
    """The quasi-Hamiltonian structure on 1 <-> 2 with e + aa* inverted."""
    q = one_pair_quiver()
    P = parse_element("D(a) D(a*) + 1/2 a D(a) D(a*) a* - 1/2 a* D(a*) D(a) a", q)
    Phi = localize_normal_form(parse_element("e(1) + a a* + e(2) - a* inv(a) a", q))
    return HamiltonianStructure(q, P, Phi, "multiplicative", q.order)


def gauge_part(q: Quiver, i: int) -> Element:
    """F_a = D(a*) a* - a D(a), closed at t(a)."""
    j = q.partner(i)
    return _letter(q, j, DERIVATION) * _letter(q, j) - _letter(q, i) * _letter(q, i, DERIVATION)


def _factor(q: Quiver, i: int) -> Element:
    """(e_{t(a)} + a a*)^{eps(a)} with the inverse written as an inverse letter."""
    if q.eps(i) == 1:
        return Element._raw(q, {((-1, q.tail(i)),): Fraction(1)}) + \
            _letter(q, i) * _letter(q, q.partner(i))
    return _letter(q, i, INVERSE)


def general_quasi(q: Quiver, ordering: Sequence[str] | None = None) -> HamiltonianStructure:
    """Quasi-Hamiltonian structure on a doubled quiver for a total arrow ordering."""
    _require_doubled(q)
    if ordering is not None:
        if sorted(ordering) != sorted(a.id for a in q.arrows):
            raise QuiverError("ordering must be a total order on all arrows")
        q = q.with_order(ordering)
    q = q.fully_inverted()
    n = len(q.arrows)
    ranked = sorted(range(n), key=q.rank)
    P = Element.zero(q)
    for i in range(n):
        j = q.partner(i)
        e = Element._raw(q, {((-1, q.head(i)),): Fraction(1)})
        term = (e + _letter(q, j) * _letter(q, i)) * _letter(q, i, DERIVATION) \
            * _letter(q, j, DERIVATION)
        P = P + term.scale(q.eps(i))
    F = {i: gauge_part(q, i) for i in range(n)}
    for x, i in enumerate(ranked):
        for k in ranked[x + 1:]:
            if q.tail(i) == q.tail(k):
                P = P - F[i] * F[k]
    P = P.scale(HALF)
    Phi = Element.zero(q)
    for v in range(len(q.vertices)):
        prod = Element._raw(q, {((-1, v),): Fraction(1)})
        for i in ranked:
            if q.tail(i) == v:
                prod = prod * _factor(q, i)
        Phi = Phi + prod
    return HamiltonianStructure(q, P, localize_normal_form(Phi), "multiplicative", q.order)


def standard_table(q: Quiver) -> DoubleBracketTable:
    T = q._cache.get("standard_table")
    if T is None:
        T = q._cache["standard_table"] = standard_hamiltonian(q).table()
    return T


def necklace_bracket(x: Element, y: Element) -> Element:
    """Necklace Lie bracket of the classes of x and y."""
    q = x.quiver
    _require_doubled(q)
    T = standard_table(q)
    return necklace_normal_form(
        single_bracket(T, necklace_normal_form(x), necklace_normal_form(y)))


def _scalars(q: Quiver, values: Mapping | None) -> Element:
    out = Element.zero(q)
    for v, c in (values or {}).items():
        out = out + Element.idem(q, v).scale(Fraction(c))
    return out


def preprojective_relation(q: Quiver, lam: Mapping | None = None) -> Element:
    """mu - sum_i lambda_i e_i."""
    return standard_hamiltonian(q).moment - _scalars(q, lam)


def multiplicative_relation(q: Quiver, qvals: Mapping,
                            ordering: Sequence[str] | None = None) -> Element:
    """Phi - sum_i q_i e_i for the ordered product Phi."""
    if any(Fraction(c) == 0 for c in qvals.values()):
        raise ValueError("q must be nonzero at every vertex")
    S = general_quasi(q, ordering)
    return S.moment - _scalars(S.quiver, qvals)


def loop_quiver() -> Quiver:
    """L: one vertex with a loop t."""
    return quiver([1], [("t", 1, 1)])


def pair_quiver() -> Quiver:
    """P2: 1 -> 2."""
    return quiver([1, 2], [("a", 1, 2)])


def doubled(q: Quiver) -> Quiver:
    return build_doubled_quiver(q)


def quiver_corpus(max_arrows: int = 3) -> list:
    """All quivers with at most max_arrows arrows and no isolated vertex, up to isomorphism.

    The arrowless one-vertex quiver stands in for the empty case.
    """
    from itertools import combinations_with_replacement, permutations

    seen, out = set(), [quiver([1], [])]
    for m in range(1, max_arrows + 1):
        for n in range(1, 2 * m + 1):
            pairs = [(t, h) for t in range(n) for h in range(n)]
            for arrows in combinations_with_replacement(pairs, m):
                if {v for a in arrows for v in a} != set(range(n)):
                    continue
                key = min(tuple(sorted((p[t], p[h]) for t, h in arrows))
                          for p in permutations(range(n)))
                if (n, key) in seen:
                    continue
                seen.add((n, key))
                out.append(quiver(range(1, n + 1),
                                  [(f"a{k}", t + 1, h + 1) for k, (t, h) in enumerate(key)]))
    return out
