"""Nested Chebyshev-Gauss-Lobatto grids and Smolyak interpolation.

Level ``i`` has ``m_1 = 1`` point (the origin) and ``m_i = 2**(i-1) + 1``
points ``x_j = -cos((j-1) pi / (m_i - 1))`` for ``i >= 2``; the levels are
nested.  The Smolyak operator

    A(q, d) = sum_{d <= |i|_1 <= q} Delta^{i_1} x ... x Delta^{i_d},
    Delta^i = U^i - U^{i-1},

is evaluated through the equivalent combination of full tensor
interpolants ``U^{i_1} x ... x U^{i_d}`` with coefficients
``(-1)**(q-|i|) * C(d-1, q-|i|)`` over ``q-d+1 <= |i|_1 <= q``.

One-dimensional interpolants are held as Chebyshev coefficients (a type-I
cosine transform of the nodal values) and converted to monomial coefficients
only when a polynomial is requested for network compilation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import ConditioningError
from .indexsets import (
    IndexSet,
    hyperbolic_cross_indices,
    optimized_hc_indices,
)
from .polymd import SparsePolynomialMD

__all__ = [
    "CglLevel",
    "cgl_points",
    "cgl_nodes",
    "level_size",
    "sparse_grid_levels",
    "sparse_grid_points",
    "sparse_grid_indices",
    "SparseGridInterpolant",
    "smolyak_interpolate",
    "interpolant_to_polynomial",
    "chebyshev_values_to_coefficients",
    "chebyshev_to_monomial",
    "cheb_to_monomial_matrix",
    "hyperbolic_cross_indices",
    "optimized_hc_indices",
    "COEFFICIENT_GATE",
]

COEFFICIENT_GATE = 1e12


def level_size(i: int) -> int:
    """Number of points ``m_i`` on level ``i`` (``m_0 = 0``)."""
    if i < 0:
        raise ValueError("level must be >= 0")
    if i == 0:
        return 0
    return 1 if i == 1 else 2 ** (i - 1) + 1


@dataclass(frozen=True)
class CglLevel:
    """Points of one nested CGL level, sorted ascending."""

    level: int
    m: int
    points: tuple


@lru_cache(maxsize=None)
def cgl_nodes(m: int) -> tuple:
    """The ``m`` points ``-cos(j pi / (m - 1))``, ``j = 0..m-1`` (``(0.0,)`` for ``m = 1``).

    Values are symmetrized so that ``x`` and ``-x`` are exact negatives and
    the midpoint is exactly zero; this keeps nested levels bit-identical.
    """
    if m < 1:
        raise ValueError("need at least one point")
    if m == 1:
        return (0.0,)
    j = np.arange(m)
    pts = -np.cos(j * np.pi / (m - 1))
    pts = 0.5 * (pts - pts[::-1])
    return tuple(float(v) for v in pts)


def _cgl(i: int) -> tuple:
    return cgl_nodes(level_size(i))


def cgl_points(i: int) -> CglLevel:
    """Nested Chebyshev-Gauss-Lobatto points of level ``i >= 1``."""
    if i < 1:
        raise ValueError("level must be >= 1")
    return CglLevel(i, level_size(i), _cgl(i))


def sparse_grid_levels(q: int, d: int) -> list[tuple]:
    """Multi-levels ``i >= 1`` with ``q - d + 1 <= |i|_1 <= q`` (combination terms)."""
    if q < d:
        raise ValueError("need q >= d")
    out = []
    for i in itertools.product(range(1, q - d + 2), repeat=d):
        if q - d + 1 <= sum(i) <= q:
            out.append(i)
    return out


def sparse_grid_points(q: int, d: int) -> np.ndarray:
    """The sparse grid as an array of shape ``(n_points, d)``, sorted lexicographically."""
    pts = set()
    for i in sparse_grid_levels(q, d):
        for p in itertools.product(*[_cgl(t) for t in i]):
            pts.add(p)
    return np.array(sorted(pts), dtype=float).reshape(-1, d)


def sparse_grid_indices(q: int, d: int) -> IndexSet:
    """Degree multi-indices spanned by ``A(q, d)``.

    Union over ``d <= |i|_1 <= q`` of ``{k : k_j < m_{i_j}}``; downward closed.
    """
    members = set()
    for i in sparse_grid_levels(q, d):
        members.update(itertools.product(*[range(level_size(t)) for t in i]))
    return IndexSet.from_iterable(d, members, "sparse-grid", q=q)


# ----------------------------------------------------- 1-d transforms ----


@lru_cache(maxsize=None)
def _values_to_cheb_matrix(m: int) -> np.ndarray:
    # Maps values at ascending CGL points to Chebyshev coefficients of the
    # degree m-1 interpolant (type-I cosine transform).
    if m == 1:
        return np.ones((1, 1))
    n = m - 1
    x = np.array(cgl_nodes(m))
    T = C.chebvander(x, n)  # T[j, k] = T_k(x_j)
    w = np.ones(m)
    w[0] = w[-1] = 0.5
    M = (2.0 / n) * (T * w[:, None]).T
    M[0] *= 0.5
    M[-1] *= 0.5
    M.setflags(write=False)
    return M


def chebyshev_values_to_coefficients(values) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through values at CGL points.

    ``values`` are taken at the ``m`` ascending points :func:`cgl_nodes` ``(m)``;
    the leading axis is transformed.
    """
    v = np.asarray(values, dtype=float)
    return _values_to_cheb_matrix(v.shape[0]) @ v


def chebyshev_to_monomial(coeffs) -> np.ndarray:
    """Convert Chebyshev coefficients to monomial coefficients.

    Raises
    ------
    ConditioningError
        If any monomial coefficient exceeds the gate ``1e12`` in magnitude.
    """
    mono = C.cheb2poly(np.asarray(coeffs, dtype=float))
    if np.max(np.abs(mono), initial=0.0) > COEFFICIENT_GATE:
        raise ConditioningError(
            f"monomial coefficients reach {np.max(np.abs(mono)):.3e}; lower the degree"
        )
    return mono


@lru_cache(maxsize=None)
def cheb_to_monomial_matrix(m: int) -> np.ndarray:
    """Matrix whose column ``k`` holds the monomial coefficients of ``T_k``, ``k < m``."""
    M = np.zeros((m, m))
    for k in range(m):
        M[: k + 1, k] = C.cheb2poly(np.eye(m)[k])[: k + 1]
    M.setflags(write=False)
    return M


# ------------------------------------------------------------ Smolyak ----


@dataclass
class SparseGridInterpolant:
    """Smolyak interpolant ``A(q, d) f`` with CGL levels.

    Attributes
    ----------
    d, q : int
    values : dict
        Grid point (tuple) to sampled function value.
    terms : list of (level multi-index, weight, Chebyshev coefficient tensor)
        The combination of tensor interpolants.
    """

    d: int
    q: int
    values: dict
    terms: list = field(repr=False)

    @property
    def points(self) -> np.ndarray:
        return np.array(sorted(self.values), dtype=float).reshape(-1, self.d)

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"expected points of dimension {self.d}")
        out = np.zeros(X.shape[0])
        vander_cache: dict = {}
        for level, w, coef in self.terms:
            acc = coef
            # contract the last axis first: acc[..., k] with T_k(x_d)
            mats = []
            for j, t in enumerate(level):
                key = (j, t)
                if key not in vander_cache:
                    vander_cache[key] = C.chebvander(X[:, j], level_size(t) - 1)
                mats.append(vander_cache[key])
            val = _tensor_eval(acc, mats)
            out += w * val
        return out


def _tensor_eval(coef: np.ndarray, mats: list) -> np.ndarray:
    # sum_{k} coef[k_1..k_d] prod_j mats[j][p, k_j], pointwise over p
    res = np.einsum("pk,k...->p...", mats[0], coef)
    for M in mats[1:]:
        res = np.einsum("pk,pk...->p...", M, res)
    return res


def smolyak_interpolate(f: Callable, q: int, d: int) -> SparseGridInterpolant:
    """Build the Smolyak interpolant of ``f`` on ``[-1, 1]^d``.

    Parameters
    ----------
    f : callable
        Takes an array of shape ``(n_points, d)`` and returns ``n_points``
        values.
    q : int
        Level parameter, ``q >= d``.
    d : int
        Dimension.

    Returns
    -------
    SparseGridInterpolant
    """
    if q < d:
        raise ValueError("need q >= d")
    grid = sparse_grid_points(q, d)
    vals = np.asarray(f(grid), dtype=float).reshape(-1)
    if vals.shape[0] != grid.shape[0]:
        raise ValueError("f must return one value per point")
    lookup = {tuple(p): float(v) for p, v in zip(grid, vals)}
    terms = []
    for level in sparse_grid_levels(q, d):
        w = (-1) ** (q - sum(level)) * comb(d - 1, q - sum(level))
        if w == 0:
            continue
        axes = [_cgl(t) for t in level]
        shape = tuple(len(a) for a in axes)
        V = np.empty(shape)
        for idx in itertools.product(*[range(s) for s in shape]):
            V[idx] = lookup[tuple(axes[j][idx[j]] for j in range(d))]
        coef = V
        for j in range(d):
            M = _values_to_cheb_matrix(shape[j])
            coef = np.moveaxis(np.tensordot(M, coef, axes=([1], [j])), 0, j)
        terms.append((level, float(w), coef))
    return SparseGridInterpolant(d, q, lookup, terms)


def interpolant_to_polynomial(g: SparseGridInterpolant) -> SparsePolynomialMD:
    """Express the interpolant in the monomial basis.

    The support is the full sparse-grid degree set (downward closed), so the
    result can be compiled with
    :func:`~requnet.polymd.compile_downward_closed`.

    Raises
    ------
    ConditioningError
        If the Chebyshev to monomial change of basis makes any coefficient
        exceed ``1e12`` in magnitude.
    """
    d = g.d
    acc: dict = {}
    conv_cache: dict = {}
    for level, w, coef in g.terms:
        mono = coef
        for j, t in enumerate(level):
            m = level_size(t)
            if m not in conv_cache:
                conv_cache[m] = cheb_to_monomial_matrix(m)
            mono = np.moveaxis(np.tensordot(conv_cache[m], mono, axes=([1], [j])), 0, j)
        for idx in itertools.product(*[range(s) for s in mono.shape]):
            acc[idx] = acc.get(idx, 0.0) + w * mono[idx]
    peak = max((abs(v) for v in acc.values()), default=0.0)
    if peak > COEFFICIENT_GATE:
        raise ConditioningError(f"monomial coefficients reach {peak:.3e}; lower q")
    support = sparse_grid_indices(g.q, d)
    terms = {k: v for k, v in acc.items()}
    return SparsePolynomialMD(d, terms, support)
