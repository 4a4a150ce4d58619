"""Graded word algebras on quivers.

One word representation serves the path algebra, its localization at the
elements e + aa*, the poly-vector fields (derivation letters) and the
noncommutative forms (differential letters).  Products are "x then y":
arrow a runs t(a) -> h(a) and xy is defined when target(x) = source(y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _iproduct
from typing import Iterable, Iterator, Mapping, Sequence, Union

VERTEX = -1
ARROW = 0
INVERSE = 1
DERIVATION = 2
DIFFERENTIAL = 3

KIND_NAMES = {ARROW: "arrow", INVERSE: "inv", DERIVATION: "D", DIFFERENTIAL: "d"}

Letter = tuple  # (kind, index)
Word = tuple  # tuple of letters; ((VERTEX, i),) is the idempotent e_i

Scalar = Union[int, Fraction]


class QuiverError(ValueError):
    pass


class MixedQuiverError(ValueError):
    pass


def letter_degree(letter: Letter) -> int:
    return 1 if letter[0] >= DERIVATION else 0


def word_degree(word: Word) -> int:
    d = 0
    for k, _ in word:
        if k >= DERIVATION:
            d += 1
    return d


def word_grade(word: Word, kind: int = DERIVATION) -> int:
    return sum(1 for k, _ in word if k == kind)


def is_idempotent(word: Word) -> bool:
    return word[0][0] == VERTEX


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: object
    head: object


@dataclass(frozen=True)
class Quiver:
    """A finite quiver, possibly doubled, with optional inverse letters.

    ``inverted`` lists arrow ids a for which (e_{t(a)} + a a*)^{-1} is adjoined.
    ``units`` lists pairs (u, u') of mutually inverse arrows; they only appear
    in the ambient algebras used by the trace map.
    """

    vertices: tuple
    arrows: tuple = ()
    doubled: bool = False
    epsilon: tuple = ()
    order: tuple = ()
    inverted: tuple = ()
    units: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        arrows = tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in self.arrows)
        object.__setattr__(self, "arrows", arrows)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex ids")
        ids = [a.id for a in arrows]
        if len(set(ids)) != len(ids):
            raise QuiverError("duplicate arrow ids")
        vset = set(self.vertices)
        for a in arrows:
            if a.tail not in vset or a.head not in vset:
                raise QuiverError(f"arrow {a.id} has an undeclared end vertex")
        order = tuple(self.order) if self.order else tuple(ids)
        if sorted(order) != sorted(ids):
            raise QuiverError("order must list every arrow exactly once")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "inverted", tuple(self.inverted))
        object.__setattr__(self, "units", tuple(tuple(u) for u in self.units))
        vindex = {v: i for i, v in enumerate(self.vertices)}
        aindex = {a: i for i, a in enumerate(ids)}
        partner = {}
        if self.doubled:
            eps = tuple(self.epsilon)
            if len(eps) != len(arrows) or any(e not in (1, -1) for e in eps):
                raise QuiverError("doubled quiver needs epsilon = +-1 per arrow")
            object.__setattr__(self, "epsilon", eps)
            for i, a in enumerate(arrows):
                if eps[i] == 1:
                    j = aindex.get(a.id + "*")
                    if j is None or eps[j] != -1:
                        raise QuiverError(f"arrow {a.id} has no partner {a.id}*")
                    b = arrows[j]
                    if b.tail != a.head or b.head != a.tail:
                        raise QuiverError(f"{b.id} is not opposite to {a.id}")
                    partner[i], partner[j] = j, i
            if len(partner) != len(arrows):
                raise QuiverError("doubled quiver arrows must come in pairs (a, a*)")
        elif self.epsilon:
            raise QuiverError("epsilon is only meaningful on doubled quivers")
        for a in self.inverted:
            if a not in aindex:
                raise QuiverError(f"unknown inverted arrow {a}")
            if aindex[a] not in partner:
                raise QuiverError("inverse letters need a doubled quiver")
        for u, w in self.units:
            if u not in aindex or w not in aindex:
                raise QuiverError(f"unknown unit arrows {u}, {w}")
            au, aw = arrows[aindex[u]], arrows[aindex[w]]
            if au.tail != aw.head or au.head != aw.tail:
                raise QuiverError(f"unit arrows {u}, {w} are not opposite")
        c = self._cache
        c["vindex"] = vindex
        c["aindex"] = aindex
        c["partner"] = partner
        c["tail"] = tuple(vindex[a.tail] for a in arrows)
        c["head"] = tuple(vindex[a.head] for a in arrows)
        c["rank"] = {a: k for k, a in enumerate(order)}

    # -- lookups -------------------------------------------------------
    def vertex_index(self, v) -> int:
        try:
            return self._cache["vindex"][v]
        except KeyError:
            raise QuiverError(f"unknown vertex {v!r}") from None

    def arrow_index(self, a: str) -> int:
        try:
            return self._cache["aindex"][a]
        except KeyError:
            raise QuiverError(f"unknown arrow {a!r}") from None

    def has_arrow(self, a: str) -> bool:
        return a in self._cache["aindex"]

    def partner(self, i: int) -> int:
        return self._cache["partner"][i]

    def tail(self, i: int) -> int:
        return self._cache["tail"][i]

    def head(self, i: int) -> int:
        return self._cache["head"][i]

    def eps(self, i: int) -> int:
        return self.epsilon[i]

    def rank(self, i: int) -> int:
        """Position of arrow i in the chosen total ordering."""
        return self._cache["rank"][self.arrows[i].id]

    def is_inverted(self, i: int) -> bool:
        return self.arrows[i].id in self.inverted

    @property
    def base_arrows(self) -> tuple:
        """Indices of the arrows of Q (epsilon = +1), or all arrows if undoubled."""
        if not self.doubled:
            return tuple(range(len(self.arrows)))
        return tuple(i for i, e in enumerate(self.epsilon) if e == 1)

    def ends(self, letter: Letter) -> tuple:
        k, i = letter
        if k == VERTEX:
            return i, i
        t, h = self._cache["tail"][i], self._cache["head"][i]
        if k == ARROW or k == DIFFERENTIAL:
            return t, h
        if k == INVERSE:
            return t, t
        return h, t

    def letters(self, kinds: Iterable[int] = (ARROW, INVERSE)) -> list:
        out = []
        for k in kinds:
            for i in range(len(self.arrows)):
                if k == INVERSE and not self.is_inverted(i):
                    continue
                out.append((k, i))
        return out

    def letter_name(self, letter: Letter) -> str:
        k, i = letter
        if k == VERTEX:
            return f"e({self.vertices[i]})"
        name = self.arrows[i].id
        if k == ARROW:
            return name
        return f"{KIND_NAMES[k]}({name})"

    def with_inverted(self, ids: Iterable[str]) -> "Quiver":
        return Quiver(self.vertices, self.arrows, self.doubled, self.epsilon,
                      self.order, tuple(ids), self.units)

    def with_order(self, order: Sequence[str]) -> "Quiver":
        return Quiver(self.vertices, self.arrows, self.doubled, self.epsilon,
                      tuple(order), self.inverted, self.units)

    def fully_inverted(self) -> "Quiver":
        return self.with_inverted(a.id for a in self.arrows)

    def __repr__(self):
        arr = ", ".join(f"{a.id}:{a.tail}->{a.head}" for a in self.arrows)
        extra = " doubled" if self.doubled else ""
        if self.inverted:
            extra += f" inverted={list(self.inverted)}"
        return f"Quiver(vertices={list(self.vertices)}, arrows=[{arr}]{extra})"


def build_doubled_quiver(q: Quiver) -> Quiver:
    if q.doubled:
        raise QuiverError("quiver is already doubled")
    arrows, eps = [], []
    for a in q.arrows:
        arrows += [a, Arrow(a.id + "*", a.head, a.tail)]
        eps += [1, -1]
    order = []
    for a in q.order:
        order += [a, a + "*"]
    return Quiver(q.vertices, arrows, True, eps, order, q.inverted, q.units)


def quiver(vertices, arrows, *, double=False, order=None, invert=()) -> Quiver:
    """Convenience constructor from plain data; ``double`` doubles first."""
    q = Quiver(tuple(vertices), tuple(Arrow(*a) for a in arrows))
    if double:
        q = build_doubled_quiver(q)
    if order:
        q = q.with_order(order)
    if invert:
        q = q.with_inverted(invert)
    return q


# -- raw word level -------------------------------------------------------

def word_ends(q: Quiver, w: Word) -> tuple:
    return q.ends(w[0])[0], q.ends(w[-1])[1]


def concat(q: Quiver, u: Word, v: Word):
    """Concatenate two words; None when they do not compose."""
    if u[0][0] == VERTEX:
        return v if q.ends(v[0])[0] == u[0][1] else None
    if v[0][0] == VERTEX:
        return u if q.ends(u[-1])[1] == v[0][1] else None
    if q.ends(u[-1])[1] != q.ends(v[0])[0]:
        return None
    return u + v


def join_parts(q: Quiver, prefix: Word, suffix: Word, vertex: int) -> Word:
    """prefix . e_vertex . suffix with the idempotent dropped when possible."""
    if prefix:
        return prefix + suffix
    if suffix:
        return suffix
    return ((VERTEX, vertex),)


def add_into(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def mul_terms(q: Quiver, x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for u, a in x.items():
        for v, b in y.items():
            w = concat(q, u, v)
            if w is not None:
                add_into(out, w, a * b)
    return out


def _rules(q: Quiver) -> tuple:
    """Rewrite rules as {pattern: [(replacement word or vertex, coeff)]}."""
    c = q._cache
    if "rules" in c:
        return c["rules"]
    rules: dict = {}
    for name in q.inverted:
        i = q.arrow_index(name)
        j = q.partner(i)
        t = q.tail(i)
        repl = [(t, 1), (((INVERSE, i),), -1)]
        rules[((INVERSE, i), (ARROW, i), (ARROW, j))] = repl
        rules[((ARROW, i), (ARROW, j), (INVERSE, i))] = repl
    for name in q.inverted:
        i = q.arrow_index(name)
        j = q.partner(i)
        if q.eps(i) == -1 and q.arrows[j].id in q.inverted:
            rules[((INVERSE, i),)] = [
                (q.tail(i), 1), (((ARROW, i), (INVERSE, j), (ARROW, j)), -1)]
    for u, w in q.units:
        iu, iw = q.arrow_index(u), q.arrow_index(w)
        rules[((ARROW, iu), (ARROW, iw))] = [(q.tail(iu), 1)]
        rules[((ARROW, iw), (ARROW, iu))] = [(q.tail(iw), 1)]
    lengths = sorted({len(p) for p in rules})
    c["rules"] = (rules, lengths)
    return c["rules"]


def find_redex(q: Quiver, w: Word):
    rules, lengths = _rules(q)
    if not rules or w[0][0] == VERTEX:
        return None
    n = len(w)
    for k in range(n):
        for m in lengths:
            if k + m <= n:
                r = rules.get(w[k:k + m])
                if r is not None:
                    return k, m, r
    return None


def rewrite_once(q: Quiver, w: Word, redex) -> dict:
    k, m, repl = redex
    prefix, suffix = w[:k], w[k + m:]
    out: dict = {}
    for r, c in repl:
        if isinstance(r, int):
            nw = join_parts(q, prefix, suffix, r)
        else:
            nw = prefix + r + suffix
        add_into(out, nw, Fraction(c))
    return out


def localize_word(q: Quiver, w: Word) -> dict:
    cache = q._cache.setdefault("lnf", {})
    hit = cache.get(w)
    if hit is not None:
        return hit
    red = find_redex(q, w)
    if red is None:
        res = {w: Fraction(1)}
    else:
        res = {}
        for nw, c in rewrite_once(q, w, red).items():
            for fw, fc in localize_word(q, nw).items():
                add_into(res, fw, c * fc)
    cache[w] = res
    return res


def localize_terms(q: Quiver, terms: Mapping) -> dict:
    if not _rules(q)[0]:
        return dict(terms)
    out: dict = {}
    for w, c in terms.items():
        for fw, fc in localize_word(q, w).items():
            add_into(out, fw, c * fc)
    return out


def rotations(w: Word) -> Iterator[tuple]:
    """Yield (sign, rotation) for every cyclic rotation of a closed word."""
    n = len(w)
    degs = [letter_degree(x) for x in w]
    total = sum(degs)
    pre = 0
    for k in range(n):
        sign = -1 if (pre * (total - pre)) % 2 else 1
        yield sign, w[k:] + w[:k]
        pre += degs[k]


def necklace_word(q: Quiver, w: Word) -> dict:
    cache = q._cache.setdefault("nnf", {})
    hit = cache.get(w)
    if hit is not None:
        return hit
    s, t = word_ends(q, w)
    if s != t:
        res: dict = {}
    elif w[0][0] == VERTEX:
        res = {w: Fraction(1)}
    else:
        res = None
        for sign, r in rotations(w):
            red = find_redex(q, r)
            if red is not None:
                res = {}
                for nw, c in rewrite_once(q, r, red).items():
                    for fw, fc in necklace_word(q, nw).items():
                        add_into(res, fw, sign * c * fc)
                break
        if res is None:
            best = min(r for _, r in rotations(w))
            signs = {sg for sg, r in rotations(w) if r == best}
            res = {} if len(signs) == 2 else {best: Fraction(signs.pop())}
    cache[w] = res
    return res


def necklace_terms(q: Quiver, terms: Mapping) -> dict:
    out: dict = {}
    for w, c in terms.items():
        for fw, fc in necklace_word(q, w).items():
            add_into(out, fw, c * fc)
    return out


# -- elements -------------------------------------------------------------

def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def _same(q1: Quiver, q2: Quiver) -> None:
    if q1 is not q2 and q1 != q2:
        raise MixedQuiverError("operands live over different quivers")


class Element:
    """A finite rational combination of words over a quiver."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: Mapping | None = None):
        self.quiver = quiver
        t = {}
        for w, c in (terms or {}).items():
            c = _frac(c)
            if c:
                t[tuple(w)] = t.get(tuple(w), 0) + c
        self.terms = {w: c for w, c in t.items() if c}

    @classmethod
    def _raw(cls, quiver: Quiver, terms: dict) -> "Element":
        e = cls.__new__(cls)
        e.quiver = quiver
        e.terms = terms
        return e

    # constructors
    @classmethod
    def zero(cls, q: Quiver) -> "Element":
        return cls._raw(q, {})

    @classmethod
    def idem(cls, q: Quiver, v) -> "Element":
        return cls._raw(q, {((VERTEX, q.vertex_index(v)),): Fraction(1)})

    @classmethod
    def one(cls, q: Quiver) -> "Element":
        return cls._raw(q, {((VERTEX, i),): Fraction(1) for i in range(len(q.vertices))})

    @classmethod
    def letter(cls, q: Quiver, arrow: str, kind: int = ARROW) -> "Element":
        i = q.arrow_index(arrow)
        if kind == INVERSE and not q.is_inverted(i):
            raise QuiverError(f"arrow {arrow} is not inverted")
        return cls._raw(q, {((kind, i),): Fraction(1)})

    @classmethod
    def word(cls, q: Quiver, word: Word, coeff: Scalar = 1) -> "Element":
        word = tuple(word)
        for x, y in zip(word, word[1:]):
            if x[0] == VERTEX or y[0] == VERTEX or q.ends(x)[1] != q.ends(y)[0]:
                raise QuiverError("word is not composable")
        return cls(q, {word: coeff})

    # arithmetic
    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        _same(self.quiver, other.quiver)
        t = dict(self.terms)
        for w, c in other.terms.items():
            add_into(t, w, c)
        return Element._raw(self.quiver, t)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw(self.quiver, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Scalar) -> "Element":
        c = _frac(c)
        if not c:
            return Element.zero(self.quiver)
        return Element._raw(self.quiver, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not available")
        out = Element.one(self.quiver)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return (self.quiver is other.quiver or self.quiver == other.quiver) \
            and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        for w in sorted(self.terms):
            yield w, self.terms[w]

    def __len__(self):
        return len(self.terms)

    # queries
    def degrees(self) -> set:
        return {word_degree(w) for w in self.terms}

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop() if ds else 0

    def grades(self, kind: int = DERIVATION) -> set:
        return {word_grade(w, kind) for w in self.terms}

    def grade(self, kind: int = DERIVATION) -> int:
        gs = self.grades(kind)
        if len(gs) > 1:
            raise ValueError("element is not homogeneous")
        return gs.pop() if gs else 0

    def left(self, v) -> "Element":
        i = self.quiver.vertex_index(v)
        return Element._raw(self.quiver, {w: c for w, c in self.terms.items()
                                          if self.quiver.ends(w[0])[0] == i})

    def right(self, v) -> "Element":
        i = self.quiver.vertex_index(v)
        return Element._raw(self.quiver, {w: c for w, c in self.terms.items()
                                          if self.quiver.ends(w[-1])[1] == i})

    def corner(self, v) -> "Element":
        return self.left(v).right(v)

    def __repr__(self):
        from .parse import format_element
        return format_element(self)

    __str__ = __repr__


def multiply(x: Element, y: Element) -> Element:
    _same(x.quiver, y.quiver)
    return Element._raw(x.quiver, mul_terms(x.quiver, x.terms, y.terms))


def localize_normal_form(x):
    """Rewrite every word with the inverse-letter rules until irreducible."""
    if isinstance(x, Tensor):
        return x.map_components(lambda t: localize_terms(x.quiver, t))
    return Element._raw(x.quiver, localize_terms(x.quiver, x.terms))


def necklace_normal_form(x: Element) -> Element:
    """Canonical representative modulo graded commutators."""
    return Element._raw(x.quiver, necklace_terms(x.quiver, x.terms))


def commutator(x: Element, y: Element) -> Element:
    """Graded commutator xy - (-1)^{|x||y|} yx of homogeneous elements."""
    s = -1 if x.degree() * y.degree() % 2 else 1
    return x * y - (y * x).scale(s)


def idem(q: Quiver, v) -> Element:
    return Element.idem(q, v)


def letter(q: Quiver, arrow: str, kind: int = ARROW) -> Element:
    return Element.letter(q, arrow, kind)


# -- tensors -------------------------------------------------------------

class Tensor:
    """Rational combination of k-tuples of words."""

    __slots__ = ("quiver", "arity", "terms")

    def __init__(self, quiver: Quiver, arity: int, terms: Mapping | None = None):
        if arity < 1:
            raise ValueError("arity must be positive")
        self.quiver = quiver
        self.arity = arity
        t: dict = {}
        for key, c in (terms or {}).items():
            key = tuple(tuple(w) for w in key)
            if len(key) != arity:
                raise ValueError("tensor term of the wrong arity")
            add_into(t, key, _frac(c))
        self.terms = t

    @classmethod
    def _raw(cls, quiver, arity, terms) -> "Tensor":
        t = cls.__new__(cls)
        t.quiver, t.arity, t.terms = quiver, arity, terms
        return t

    @classmethod
    def zero(cls, q: Quiver, arity: int) -> "Tensor":
        return cls._raw(q, arity, {})

    @classmethod
    def of(cls, *factors: Element) -> "Tensor":
        """x1 (x) x2 (x) ... as a tensor."""
        q = factors[0].quiver
        for f in factors:
            _same(q, f.quiver)
        out: dict = {}
        for combo in _iproduct(*(f.terms.items() for f in factors)):
            c = Fraction(1)
            for _, v in combo:
                c *= v
            add_into(out, tuple(w for w, _ in combo), c)
        return cls._raw(q, len(factors), out)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        _same(self.quiver, other.quiver)
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        t = dict(self.terms)
        for k, c in other.terms.items():
            add_into(t, k, c)
        return Tensor._raw(self.quiver, self.arity, t)

    __radd__ = __add__

    def __neg__(self):
        return Tensor._raw(self.quiver, self.arity, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Scalar) -> "Tensor":
        c = _frac(c)
        if not c:
            return Tensor.zero(self.quiver, self.arity)
        return Tensor._raw(self.quiver, self.arity, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms \
            and (self.quiver is other.quiver or self.quiver == other.quiver)

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        for k in sorted(self.terms):
            yield k, self.terms[k]

    def __len__(self):
        return len(self.terms)

    def map_components(self, fn) -> "Tensor":
        """Apply a linear map (on term dicts) to every tensor factor."""
        out: dict = {}
        for key, c in self.terms.items():
            images = [fn({w: Fraction(1)}) for w in key]
            for combo in _iproduct(*(im.items() for im in images)):
                v = c
                for _, x in combo:
                    v *= x
                add_into(out, tuple(w for w, _ in combo), v)
        return Tensor._raw(self.quiver, self.arity, out)

    def multiply_out(self, order: Sequence[int] | None = None) -> Element:
        """m(x1 (x) ... (x) xk) = x1 ... xk, optionally in another order."""
        q = self.quiver
        out: dict = {}
        idx = range(self.arity) if order is None else order
        for key, c in self.terms.items():
            w = key[idx[0]] if order is not None else key[0]
            ok = True
            for k in list(idx)[1:]:
                w = concat(q, w, key[k])
                if w is None:
                    ok = False
                    break
            if ok:
                add_into(out, w, c)
        return Element._raw(q, out)

    def outer(self, left: Element | None = None, right: Element | None = None) -> "Tensor":
        """b (u1 (x) ... (x) uk) c = b u1 (x) ... (x) uk c."""
        q = self.quiver
        out: dict = {}
        lt = left.terms if left is not None else None
        rt = right.terms if right is not None else None
        for key, c in self.terms.items():
            firsts = [(key[0], Fraction(1))] if lt is None else \
                [(w, a) for b, a in lt.items() if (w := concat(q, b, key[0])) is not None]
            if not firsts:
                continue
            if self.arity == 1:
                for f, a in firsts:
                    lasts = [(f, Fraction(1))] if rt is None else \
                        [(w, b) for d, b in rt.items() if (w := concat(q, f, d)) is not None]
                    for l_, b in lasts:
                        add_into(out, (l_,), c * a * b)
                continue
            lasts = [(key[-1], Fraction(1))] if rt is None else \
                [(w, b) for d, b in rt.items() if (w := concat(q, key[-1], d)) is not None]
            for f, a in firsts:
                for l_, b in lasts:
                    add_into(out, (f,) + key[1:-1] + (l_,), c * a * b)
        return Tensor._raw(q, self.arity, out)

    def inner(self, left: Element, right: Element) -> "Tensor":
        """Inner bimodule action on arity 2: b * (u (x) v) * c = u c (x) b v."""
        if self.arity != 2:
            raise ValueError("inner action is defined on arity 2")
        q = self.quiver
        out: dict = {}
        for (u, v), c in self.terms.items():
            for rw, rc in right.terms.items():
                uc = concat(q, u, rw)
                if uc is None:
                    continue
                for lw, lc in left.terms.items():
                    bv = concat(q, lw, v)
                    if bv is not None:
                        add_into(out, (uc, bv), c * rc * lc)
        return Tensor._raw(q, 2, out)

    def degrees(self) -> set:
        return {sum(word_degree(w) for w in k) for k in self.terms}

    def __repr__(self):
        from .parse import format_tensor
        return format_tensor(self)

    __str__ = __repr__


def tensor(*factors: Element) -> Tensor:
    return Tensor.of(*factors)


# -- permutations ----------------------------------------------------------

def perm_from_cycles(n: int, *cycles: Sequence[int]) -> tuple:
    """One-line form (0-based images) of a product of 1-based cycles.

    The rightmost cycle acts first, so perm_from_cycles(3, (1, 2, 3)) is the
    permutation 1 -> 2 -> 3 -> 1.
    """
    img = tuple(range(n))
    for cyc in reversed(cycles):
        c = list(range(n))
        for k, x in enumerate(cyc):
            c[x - 1] = cyc[(k + 1) % len(cyc)] - 1
        img = compose(c, img)
    return img


def compose(s: Sequence[int], t: Sequence[int]) -> tuple:
    """(st)(i) = s(t(i))."""
    return tuple(s[t[i]] for i in range(len(t)))


def inverse_perm(s: Sequence[int]) -> tuple:
    inv = [0] * len(s)
    for i, x in enumerate(s):
        inv[x] = i
    return tuple(inv)


def permute_key(s: Sequence[int], key: tuple, signed: bool) -> tuple:
    """Return (sign, permuted key): position s(i) receives factor i."""
    n = len(key)
    sinv = inverse_perm(s)
    out = tuple(key[sinv[k]] for k in range(n))
    sign = 1
    if signed:
        degs = [word_degree(w) for w in key]
        t = 0
        for i in range(n):
            for j in range(i + 1, n):
                if sinv[i] > sinv[j]:
                    t += degs[sinv[i]] * degs[sinv[j]]
        sign = -1 if t % 2 else 1
    return sign, out


def apply_permutation(s: Sequence[int], x: Tensor, signed: bool = False) -> Tensor:
    """tau_s (unsigned) or sigma_s (Koszul-signed) on a tensor."""
    s = tuple(s)
    if len(s) != x.arity or sorted(s) != list(range(x.arity)):
        raise ValueError("permutation size does not match the tensor arity")
    out: dict = {}
    for key, c in x.terms.items():
        sign, nk = permute_key(s, key, signed)
        add_into(out, nk, c if sign > 0 else -c)
    return Tensor._raw(x.quiver, x.arity, out)


SWAP = (1, 0)
CYC3 = (1, 2, 0)      # tau_(123): x (x) y (x) z -> z (x) x (x) y
CYC3_INV = (2, 0, 1)  # tau_(132)
