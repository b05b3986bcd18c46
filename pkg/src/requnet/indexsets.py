"""Multi-index sets: full box, total degree, hyperbolic cross and variants.

All generators return members in lexicographic order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "IndexSet",
    "is_downward_closed",
    "downward_closure",
    "full_box_indices",
    "total_degree_indices",
    "hyperbolic_cross_indices",
    "optimized_hc_indices",
]


@dataclass(frozen=True)
class IndexSet:
    """A finite set of multi-indices of fixed dimension.

    Attributes
    ----------
    d : int
        Dimension.
    members : tuple of tuple of int
        Lexicographically sorted, without duplicates.
    flavor : str
        How the set was generated (``"full"``, ``"total"``, ``"hyperbolic"``,
        ``"optimized"``, ``"sparse-grid"`` or ``"custom"``).
    params : dict
        Generator parameters, for reporting.
    """

    d: int
    members: tuple
    flavor: str = "custom"
    params: dict = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_iterable(cls, d: int, items: Iterable, flavor: str = "custom", **params) -> "IndexSet":
        mem = sorted({tuple(int(v) for v in k) for k in items})
        for k in mem:
            if len(k) != d:
                raise ValueError(f"multi-index {k} does not have dimension {d}")
            if any(v < 0 for v in k):
                raise ValueError(f"multi-index {k} has a negative entry")
        return cls(d, tuple(mem), flavor, dict(params))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.members)

    def __contains__(self, k) -> bool:
        return tuple(k) in self._set

    @property
    def _set(self) -> frozenset:
        cached = self.__dict__.get("_cached_set")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_cached_set", cached)
        return cached

    def as_set(self) -> frozenset:
        return self._set

    def max_degrees(self) -> tuple:
        """Largest entry in each coordinate (``N_i``)."""
        if not self.members:
            return (0,) * self.d
        return tuple(max(k[i] for k in self.members) for i in range(self.d))


def _members(s) -> frozenset:
    if isinstance(s, IndexSet):
        return s.as_set()
    return frozenset(tuple(k) for k in s)


def is_downward_closed(index_set) -> bool:
    """True iff every componentwise predecessor of a member is a member.

    It suffices to check the immediate predecessors ``k - e_i``.
    """
    mem = _members(index_set)
    for k in mem:
        for i, v in enumerate(k):
            if v > 0 and (k[:i] + (v - 1,) + k[i + 1 :]) not in mem:
                return False
    return True


def downward_closure(index_set) -> frozenset:
    """Smallest downward closed set containing the given indices."""
    out = set()
    stack = list(_members(index_set))
    while stack:
        k = stack.pop()
        if k in out:
            continue
        out.add(k)
        for i, v in enumerate(k):
            if v > 0:
                stack.append(k[:i] + (v - 1,) + k[i + 1 :])
    return frozenset(out)


def full_box_indices(N: int, d: int) -> IndexSet:
    """``{k : max_i k_i <= N}``, the index set of ``Q_N^d``."""
    return IndexSet(d, tuple(itertools.product(range(N + 1), repeat=d)), "full", {"N": N})


def total_degree_indices(n: int, d: int) -> IndexSet:
    """``{k : k_1 + ... + k_d <= n}``."""

    def rec(dim, budget):
        if dim == 0:
            yield ()
            return
        for v in range(budget + 1):
            for rest in rec(dim - 1, budget - v):
                yield (v,) + rest

    return IndexSet(d, tuple(sorted(rec(d, n))), "total", {"n": n})


def _product_bounded(d: int, accept) -> list:
    # depth-first enumeration in lexicographic order; ``accept(prefix)`` must
    # be monotone (false for a prefix implies false for all extensions)
    out = []

    def rec(prefix):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        v = 0
        while True:
            cand = prefix + [v]
            if not accept(cand):
                break
            rec(cand)
            v += 1

    rec([])
    return out


def hyperbolic_cross_indices(N: int, d: int) -> IndexSet:
    """Hyperbolic cross ``{k : prod_i max(1, k_i) <= N}``.

    Parameters
    ----------
    N : int
        ``N >= 1``.
    d : int
        ``d >= 1``.
    """
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    members = _product_bounded(d, lambda p: math.prod(max(1, v) for v in p) <= N)
    return IndexSet(d, tuple(members), "hyperbolic", {"N": N})


def optimized_hc_indices(N: int, d: int, gamma: float) -> IndexSet:
    """Optimized hyperbolic cross ``(prod k_bar) * |k_bar|_inf**(-gamma) <= N**(1-gamma)``.

    ``k_bar_i = max(1, k_i)``.  The max norm is taken of ``k_bar`` so that the
    zero index is well defined for ``gamma > 0``.  ``gamma = 0`` is the
    hyperbolic cross and ``gamma = -inf`` is the full box ``|k|_inf <= N``.

    Raises
    ------
    ValueError
        If ``gamma >= 1``.
    """
    if not gamma < 1:
        raise ValueError("gamma must be < 1")
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    if math.isinf(gamma):
        return IndexSet(d, full_box_indices(N, d).members, "optimized", {"N": N, "gamma": gamma})
    rhs = float(N) ** (1.0 - gamma)
    tol = 1e-12 * rhs

    def ok(k) -> bool:
        kb = [max(1, v) for v in k]
        return math.prod(kb) * float(max(kb)) ** (-gamma) <= rhs + tol

    # the largest entry K satisfies K**(1-gamma) <= lhs, so K <= N
    members = [k for k in itertools.product(range(N + 1), repeat=d) if ok(k)]
    return IndexSet(d, tuple(sorted(members)), "optimized", {"N": N, "gamma": gamma})
