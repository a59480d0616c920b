"""Partial bijections on ``[1, t]``.

A :class:`PartialBijection` is an injective partial map from ``[1, t]`` to
itself. Complex nonterminals ``(A, f, g)`` carry two of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial
from typing import Iterable, Mapping

from .errors import CapExceeded

DEFAULT_MAX_T = 4


@dataclass(frozen=True)
class PartialBijection:
    t: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted(self.pairs))
        srcs = [i for i, _ in pairs]
        tgts = [j for _, j in pairs]
        if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
            raise ValueError(f"not a partial bijection: {pairs}")
        for i, j in pairs:
            if not (1 <= i <= self.t and 1 <= j <= self.t):
                raise ValueError(f"pair {(i, j)} outside [1, {self.t}]")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_dict(cls, t: int, m: Mapping[int, int]) -> "PartialBijection":
        return cls(t, tuple(m.items()))

    def __call__(self, i: int) -> int | None:
        for a, b in self.pairs:
            if a == i:
                return b
        return None

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def dom(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.pairs)

    @property
    def ran(self) -> frozenset[int]:
        return frozenset(j for _, j in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def is_total(self) -> bool:
        return len(self.pairs) == self.t

    def fragment(self) -> str:
        """Name fragment: pairs sorted by source as ``i-j`` joined by ``_``; ``0`` when empty."""
        if not self.pairs:
            return "0"
        return "_".join(f"{i}-{j}" for i, j in self.pairs)

    @classmethod
    def parse_fragment(cls, t: int, text: str) -> "PartialBijection":
        if text == "0":
            return cls(t, ())
        pairs = []
        for part in text.split("_"):
            i, j = part.split("-")
            pairs.append((int(i), int(j)))
        return cls(t, tuple(pairs))

    def __str__(self) -> str:
        return "{" + ", ".join(f"{i}->{j}" for i, j in self.pairs) + "}"


def identity(t: int) -> PartialBijection:
    return PartialBijection(t, tuple((i, i) for i in range(1, t + 1)))


def compose(g: PartialBijection, f: PartialBijection) -> PartialBijection:
    """``g . f``, defined on ``{i in Dom f : f(i) in Dom g}``."""
    if f.t != g.t:
        raise ValueError(f"ambient size mismatch: {f.t} vs {g.t}")
    gd = g.as_dict()
    return PartialBijection(f.t, tuple((i, gd[j]) for i, j in f.pairs if j in gd))


def count_formula(t: int) -> int:
    """``sum_k C(t,k)^2 k!``, the number of partial bijections on ``[1, t]``."""
    return sum(comb(t, k) ** 2 * factorial(k) for k in range(t + 1))


def enumerate_partial_bijections(t: int, cap: int = DEFAULT_MAX_T) -> list[PartialBijection]:
    """All partial bijections on ``[1, t]``, ordered by domain (size, then
    lexicographic) and then by images."""
    if t > cap:
        raise CapExceeded(f"partial bijections on [1,{t}] exceed the arity cap {cap} ({count_formula(t)} maps)")
    return list(_enumerate(t))


@lru_cache(maxsize=None)
def _enumerate(t: int) -> tuple[PartialBijection, ...]:
    out = []
    points = range(1, t + 1)
    for k in range(t + 1):
        for dom in combinations(points, k):
            for img in permutations(points, k):
                out.append(PartialBijection(t, tuple(zip(dom, img))))
    return tuple(out)


def from_pairs(t: int, pairs: Iterable[tuple[int, int]]) -> PartialBijection:
    return PartialBijection(t, tuple(pairs))
