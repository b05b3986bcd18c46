"""Multivariate polynomial compilers.

Every compiler splits on the last coordinate,

    f(x) = sum_{k_d} g_{k_d}(x_1, ..., x_{d-1}) * x_d**k_d,

compiles the coefficient polynomials ``g_{k_d}`` first and then feeds their
outputs, as network-valued coefficients, into a balanced tree in ``x_d``.  In
that outer tree the first layer computes ``g_{2j+1} * x_d + g_{2j}`` with a
product gadget and an identity instead of scalar weights.

* :func:`compile_downward_closed` (and :func:`compile_total_degree`) compile
  each ``g_{k_d}`` as an independent subnetwork of its own structure.
  Subnetworks that finish early have their output carried forward with
  identity passthroughs; ``x_d`` is carried to the layer where the outer tree
  starts.
* :func:`compile_tensor_product` exploits that on the full box all
  ``g_{k_d}`` share one support: the coefficient polynomials are compiled as a
  batch whose balanced trees share their first-layer copy of ``x``, its
  square and the squaring carrier chain.
"""
from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Mapping, Sequence

import numpy as np

from .builder import Expr, NetworkBuilder, Value
from .errors import ContractError
from .gadgets import emit_identity
from .indexsets import (
    IndexSet,
    full_box_indices,
    is_downward_closed,
    total_degree_indices,
)
from .network import LayeredNetwork
from .poly1d import emit_balanced_trees

__all__ = [
    "SparsePolynomialMD",
    "is_downward_closed",
    "compile_downward_closed",
    "compile_total_degree",
    "compile_tensor_product",
    "monomial_sum",
]


class SparsePolynomialMD:
    """``f(x) = sum_{k in support} a_k x**k`` in ``d`` variables.

    Parameters
    ----------
    d : int
        Number of variables.
    terms : mapping of tuple to float
        Multi-index to coefficient.  Indices missing from ``terms`` but present
        in ``support`` have coefficient zero.
    support : IndexSet or iterable of tuple, optional
        Declared support; defaults to the keys of ``terms``.
    """

    def __init__(self, d: int, terms: Mapping, support=None):
        self.d = int(d)
        clean = {}
        for k, v in terms.items():
            k = tuple(int(t) for t in k)
            if len(k) != self.d:
                raise ValueError(f"multi-index {k} does not have dimension {self.d}")
            clean[k] = clean.get(k, 0.0) + float(v)
        self.terms = clean
        if support is None:
            support = IndexSet.from_iterable(self.d, clean.keys())
        elif not isinstance(support, IndexSet):
            support = IndexSet.from_iterable(self.d, support)
        missing = [k for k in clean if k not in support]
        if missing:
            raise ValueError(f"terms outside the declared support, e.g. {missing[0]}")
        self.support = support

    def coefficient(self, k) -> float:
        return self.terms.get(tuple(k), 0.0)

    def __call__(self, X):
        return monomial_sum(self.terms, X)

    def __repr__(self):
        return f"SparsePolynomialMD(d={self.d}, n_terms={len(self.terms)}, support={len(self.support)})"


def monomial_sum(terms: Mapping, X) -> np.ndarray:
    """Evaluate ``sum a_k prod_i x_i**k_i`` directly (the reference oracle).

    Parameters
    ----------
    terms : mapping of tuple to float
    X : array_like, shape (n_points, d)

    Returns
    -------
    ndarray, shape (n_points,)
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.zeros(X.shape[0])
    if not terms:
        return out
    keys = np.array(list(terms.keys()), dtype=int)
    coef = np.array(list(terms.values()), dtype=float)
    d = keys.shape[1]
    maxdeg = keys.max(axis=0)
    for t in range(0, len(coef), 2048):
        kb = keys[t : t + 2048]
        acc = np.tile(coef[t : t + 2048], (X.shape[0], 1))
        for i in range(d):
            powers = X[:, i : i + 1] ** np.arange(maxdeg[i] + 1)[None, :]
            acc *= powers[:, kb[:, i]]
        out += acc.sum(axis=1)
    return out


class _Inputs:
    """Network inputs with identity carriers extended on demand."""

    def __init__(self, b: NetworkBuilder):
        self.b = b
        self.chains = [[x] for x in b.inputs()]

    def at(self, i: int, depth: int) -> Expr:
        chain = self.chains[i]
        while len(chain) <= depth:
            chain.append(emit_identity(self.b, chain[-1], passthrough=True))
        return chain[depth]


def _carry(b: NetworkBuilder, v: Value, depth: int) -> Value:
    if not isinstance(v, Expr):
        return v
    while v.depth < depth:
        v = emit_identity(b, v, passthrough=True)
    return v


def _split_last(coeffs: Mapping[tuple, float], support: Iterable[tuple]):
    """Group a (d)-variate support by its last index."""
    groups: dict[int, dict[tuple, float]] = defaultdict(dict)
    for k in support:
        groups[k[-1]][k[:-1]] = coeffs.get(k, 0.0)
    return groups


def _emit_independent(b: NetworkBuilder, env: _Inputs, coeffs: Mapping, support, dims: int) -> Value:
    """Plain recursion: every coefficient polynomial gets its own subnetwork."""
    support = list(support)
    if dims == 1:
        n = max(k[0] for k in support)
        c = [coeffs.get((j,), 0.0) for j in range(n + 1)]
        if n == 0:
            return c[0]
        return emit_balanced_trees(b, env.at(0, 0), [c])[0]
    groups = _split_last(coeffs, support)
    Nd = max(groups)
    vals = []
    for kd in range(Nd + 1):
        sub = groups.get(kd)
        if not sub:
            vals.append(0.0)
            continue
        vals.append(_emit_independent(b, env, sub, sub.keys(), dims - 1))
    if Nd == 0:
        return vals[0]
    D = max((v.depth for v in vals if isinstance(v, Expr)), default=0)
    vals = [_carry(b, v, D) for v in vals]
    y = env.at(dims - 1, D)
    return emit_balanced_trees(b, y, [vals])[0]


def _emit_batch(b: NetworkBuilder, env: _Inputs, polys: Sequence[Mapping], N: int, dims: int) -> list:
    """Tensor recursion: a batch of polynomials on the box ``{0..N}^dims``."""
    if dims == 1:
        lists = [[p.get((j,), 0.0) for j in range(N + 1)] for p in polys]
        return emit_balanced_trees(b, env.at(0, 0), lists)
    flat = []
    for p in polys:
        groups = _split_last(p, p.keys())
        for kd in range(N + 1):
            flat.append(groups.get(kd, {}))
    subs = _emit_batch(b, env, flat, N, dims - 1)
    D = max((v.depth for v in subs if isinstance(v, Expr)), default=0)
    subs = [_carry(b, v, D) for v in subs]
    y = env.at(dims - 1, D)
    lists = [subs[i * (N + 1) : (i + 1) * (N + 1)] for i in range(len(polys))]
    return emit_balanced_trees(b, y, lists)


def _finish(b: NetworkBuilder, out: Value) -> LayeredNetwork:
    return b.build([out])


def _as_poly(p, d: int | None = None) -> SparsePolynomialMD:
    if isinstance(p, SparsePolynomialMD):
        return p
    if isinstance(p, Mapping):
        keys = list(p.keys())
        dim = d if d is not None else len(keys[0])
        return SparsePolynomialMD(dim, p)
    raise TypeError("expected a SparsePolynomialMD or a mapping of multi-index to coefficient")


def compile_downward_closed(p) -> LayeredNetwork:
    """Compile a polynomial whose support is downward closed.

    Parameters
    ----------
    p : SparsePolynomialMD

    Returns
    -------
    LayeredNetwork
        At most ``sum_i (floor(log2 N_i) + 1)`` hidden layers, with ``N_i`` the
        largest degree in coordinate ``i``.

    Raises
    ------
    ContractError
        If the support is not downward closed.
    """
    p = _as_poly(p)
    if len(p.support) == 0:
        raise ContractError("empty support")
    if not is_downward_closed(p.support):
        raise ContractError("support is not downward closed")
    b = NetworkBuilder(p.d, 2)
    env = _Inputs(b)
    out = _emit_independent(b, env, p.terms, p.support.members, p.d)
    return _finish(b, out)


def compile_total_degree(p, n: int | None = None) -> LayeredNetwork:
    """Compile a polynomial of total degree ``n`` over the full simplex.

    The structure is that of the complete simplex ``|k|_1 <= n``; coefficients
    missing from ``p`` are zero.

    Raises
    ------
    ContractError
        If a term lies outside the simplex.
    """
    p = _as_poly(p)
    deg = max((sum(k) for k in p.terms), default=0)
    n = deg if n is None else int(n)
    if deg > n:
        raise ContractError(f"term of total degree {deg} exceeds n={n}")
    support = total_degree_indices(n, p.d)
    b = NetworkBuilder(p.d, 2)
    env = _Inputs(b)
    out = _emit_independent(b, env, p.terms, support.members, p.d)
    return _finish(b, out)


def compile_tensor_product(p, N: int | None = None) -> LayeredNetwork:
    """Compile a polynomial in ``Q_N^d`` (degree at most ``N`` per coordinate).

    Returns
    -------
    LayeredNetwork
        ``d * (floor(log2 N) + 1)`` hidden layers for ``N >= 1``.

    Raises
    ------
    ContractError
        If a term has an entry larger than ``N``.
    """
    p = _as_poly(p)
    deg = max((max(k) for k in p.terms), default=0)
    N = deg if N is None else int(N)
    if deg > N:
        raise ContractError(f"term with degree {deg} exceeds the box N={N}")
    b = NetworkBuilder(p.d, 2)
    env = _Inputs(b)
    if N == 0:
        return _finish(b, p.coefficient((0,) * p.d))
    out = _emit_batch(b, env, [p.terms], N, p.d)[0]
    return _finish(b, out)
