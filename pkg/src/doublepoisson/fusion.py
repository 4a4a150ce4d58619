"""Fusing two vertices of a quiver and transporting structures along it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (VERTEX, Arrow, Element, Quiver, QuiverError, add_into,
                   localize_normal_form)
from .polyvectors import gauge_element
from .structures import HamiltonianStructure, one_pair_quasi

HALF = Fraction(1, 2)


def relabel(x: Element, target: Quiver, vertex_map: Mapping[int, int]) -> Element:
    """Move x to a quiver with the same arrows; idempotent e_i becomes e_{map[i]}."""
    if len(x.quiver.arrows) != len(target.arrows) or \
            [a.id for a in x.quiver.arrows] != [a.id for a in target.arrows]:
        raise QuiverError("relabeling needs identical arrow lists")
    out: dict = {}
    for w, c in x.terms.items():
        if w[0][0] == VERTEX:
            w = ((VERTEX, vertex_map[w[0][1]]),)
        add_into(out, w, c)
    return Element._raw(target, out)


@dataclass(frozen=True)
class FusionMap:
    """Fusion of vertex w into vertex v; arrows keep their ids and order.

    On generators this realizes a -> a, a e21 -> a, e12 a -> a and
    e12 a e21 -> a according to which ends of a sit at w.
    """

    source: Quiver
    target: Quiver
    v: object
    w: object

    @property
    def vertex_map(self) -> dict:
        s, t = self.source, self.target
        m = {}
        for i, u in enumerate(s.vertices):
            m[i] = t.vertex_index(self.v if u == self.w else u)
        return m

    def generator_map(self) -> dict:
        """arrow id -> decorated word in the ambient algebra with e12, e21."""
        out = {}
        for a in self.source.arrows:
            word = a.id
            if a.tail == self.w:
                word = "e12·" + word
            if a.head == self.w:
                word = word + "·e21"
            out[a.id] = word
        return out

    def transport(self, x: Element) -> Element:
        if x.quiver is not self.source and x.quiver != self.source:
            raise QuiverError("element is not over the fusion source")
        return relabel(x, self.target, self.vertex_map)


def fuse_quiver(q: Quiver, v, w) -> FusionMap:
    if v == w:
        raise QuiverError("fusion needs two distinct vertices")
    q.vertex_index(v)
    q.vertex_index(w)
    arrows = tuple(Arrow(a.id, v if a.tail == w else a.tail, v if a.head == w else a.head)
                   for a in q.arrows)
    verts = tuple(u for u in q.vertices if u != w)
    target = Quiver(verts, arrows, q.doubled, q.epsilon, q.order, q.inverted)
    return FusionMap(q, target, v, w)


def fuse_polyvector(P: Element, f: FusionMap, quasi: bool = True) -> Element:
    """P^f, minus 1/2 E_v^f E_w^f when fusing a quasi-Poisson bivector."""
    if P and P.grades() != {2} and quasi:
        raise ValueError("the quasi-Poisson correction applies to grade-2 poly-vectors")
    Pf = f.transport(P)
    if quasi:
        Ev = f.transport(gauge_element(f.source, f.v))
        Ew = f.transport(gauge_element(f.source, f.w))
        Pf = Pf - (Ev * Ew).scale(HALF)
    return Pf


def fuse_moment(m: Element, f: FusionMap, kind: str) -> Element:
    """Additive: mu_v + mu_w.  Multiplicative: Phi_v^f Phi_w^f."""
    if kind == "additive":
        return f.transport(m)
    if kind != "multiplicative":
        raise ValueError("kind must be additive or multiplicative")
    s = f.source
    out = Element.zero(f.target)
    for u in s.vertices:
        if u not in (f.v, f.w):
            out = out + f.transport(m.corner(u))
    merged = f.transport(m.corner(f.v)) * f.transport(m.corner(f.w))
    return localize_normal_form(out + merged)


def fuse_structure(S: HamiltonianStructure, v, w) -> HamiltonianStructure:
    """Hamiltonian structures fuse without correction; quasi ones subtract 1/2 E_v E_w."""
    f = fuse_quiver(S.quiver, v, w)
    quasi = S.kind == "multiplicative"
    return HamiltonianStructure(
        f.target, fuse_polyvector(S.P, f, quasi), fuse_moment(S.moment, f, S.kind), S.kind,
        S.order)


# -- trace map ------------------------------------------------------------

def fusion_ambient(q: Quiver, v, w) -> Quiver:
    """q with unit arrows e12: v -> w and e21: w -> v, e12 e21 = e_v, e21 e12 = e_w."""
    for name in ("e12", "e21"):
        if q.has_arrow(name):
            raise QuiverError(f"arrow id {name} is reserved for the ambient algebra")
    arrows = q.arrows + (Arrow("e12", v, w), Arrow("e21", w, v))
    if q.doubled:
        raise QuiverError("use the undoubled presentation or relabel for the ambient")
    return Quiver(q.vertices, arrows, False, (), (), (), (("e12", "e21"),))


def trace_map(x: Element, e: Element, decomposition: Sequence) -> Element:
    """Tr(x) = sum_i e q_i x p_i e for 1 = sum_i p_i e q_i."""
    q = x.quiver
    total = Element.zero(q)
    for p, r in decomposition:
        total = total + p * e * r
    if localize_normal_form(total) != Element.one(q):
        raise ValueError("decomposition does not sum to 1")
    if localize_normal_form(e * e) != localize_normal_form(e):
        raise ValueError("e is not idempotent")
    out = Element.zero(q)
    for p, r in decomposition:
        out = out + e * r * x * p * e
    return localize_normal_form(out)


def fusion_decomposition(amb: Quiver, w) -> tuple:
    """(epsilon, [(1, 1), (e21, e12)]) with epsilon = 1 - e_w."""
    one = Element.one(amb)
    eps = one - Element.idem(amb, w)
    return eps, [(one, one), (Element.letter(amb, "e21"), Element.letter(amb, "e12"))]


# -- separated quiver --------------------------------------------------------

def separated_quiver(q: Quiver) -> Quiver:
    """Q^sep: vertex v_a per arrow, t(a) = v_a and h(a) = v_{a*}."""
    if not q.doubled:
        raise QuiverError("Q^sep is defined for doubled quivers")
    name = {a.id: f"v_{a.id}" for a in q.arrows}
    arrows = tuple(Arrow(a.id, name[a.id], name[q.arrows[q.partner(i)].id])
                   for i, a in enumerate(q.arrows))
    verts = tuple(name[a.id] for a in q.arrows)
    return Quiver(verts, arrows, True, q.epsilon, q.order,
                  tuple(a.id for a in q.arrows))


def separated_structure(q: Quiver) -> HamiltonianStructure:
    """One copy of the one-pair structure per arrow pair of Q^sep."""
    sep = separated_quiver(q)
    base = one_pair_quasi()
    P = Element.zero(sep)
    Phi = Element.zero(sep)
    for i in q.base_arrows:
        j = q.partner(i)
        a, s = q.arrows[i].id, q.arrows[j].id
        amap = {0: i, 1: j}
        vmap = {0: sep.vertex_index(f"v_{a}"), 1: sep.vertex_index(f"v_{s}")}
        P = P + _move(base.P, sep, amap, vmap)
        Phi = Phi + _move(base.moment, sep, amap, vmap)
    return HamiltonianStructure(sep, P, localize_normal_form(Phi), "multiplicative", sep.order)


def _move(x: Element, target: Quiver, amap: dict, vmap: dict) -> Element:
    out: dict = {}
    for w, c in x.terms.items():
        nw = tuple((k, vmap[i]) if k == VERTEX else (k, amap[i]) for k, i in w)
        add_into(out, nw, c)
    return Element._raw(target, out)


def fold_separated(q: Quiver, ordering: Sequence[str] | None = None) -> HamiltonianStructure:
    """Fuse Q^sep back to the doubled quiver, vertex by vertex in arrow order."""
    if ordering is not None:
        q = q.with_order(ordering)
    S = separated_structure(q)
    for i, vtx in enumerate(q.vertices):
        outgoing = sorted((j for j in range(len(q.arrows)) if q.tail(j) == i), key=q.rank)
        names = [f"v_{q.arrows[j].id}" for j in outgoing]
        for other in names[1:]:
            S = fuse_structure(S, names[0], other)
    # rename the surviving v_a to the original vertices
    final = q.fully_inverted()
    vmap = {}
    for k, u in enumerate(S.quiver.vertices):
        j = q.arrow_index(u[2:])
        vmap[k] = q.tail(j)
    relabeled = Quiver(final.vertices, final.arrows, True, final.epsilon, final.order,
                       final.inverted)
    P = relabel(S.P, relabeled, vmap)
    Phi = relabel(S.moment, relabeled, vmap)
    for i in range(len(q.vertices)):
        if not any(q.tail(j) == i for j in range(len(q.arrows))):
            Phi = Phi + Element._raw(relabeled, {((VERTEX, i),): Fraction(1)})
    return HamiltonianStructure(relabeled, P, localize_normal_form(Phi), "multiplicative",
                                relabeled.order)
