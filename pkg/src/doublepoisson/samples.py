"""Seeded random words and elements for property checks."""

from __future__ import annotations

import random
from typing import Sequence

from .core import ARROW, Element, Quiver


def random_word(q: Quiver, rng: random.Random, length: int,
                kinds: Sequence[int] = (ARROW,), closed: bool = False,
                tries: int = 200):
    """A composable word of the given length, or None if none was found."""
    for _ in range(tries):
        w = ()
        for _ in range(length):
            cands = [l for l in q.letters(kinds)
                     if not w or q.ends(w[-1])[1] == q.ends(l)[0]]
            if not cands:
                break
            w += (rng.choice(cands),)
        else:
            if not closed or q.ends(w[0])[0] == q.ends(w[-1])[1]:
                return w
    return None


def random_element(q: Quiver, rng: random.Random, terms: int = 2, max_len: int = 3,
                   kinds: Sequence[int] = (ARROW,), closed: bool = False) -> Element:
    out = Element.zero(q)
    for _ in range(terms):
        w = random_word(q, rng, rng.randint(1, max_len), kinds, closed)
        if w is not None:
            out = out + Element.word(q, w, rng.choice((-2, -1, 1, 1, 2, 3)))
    return out
