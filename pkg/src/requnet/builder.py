"""Incremental construction of layered networks from affine expressions.

Compilers describe a network as a dataflow of affine expressions.  An
:class:`Expr` is an affine combination of the outputs of one layer (layer 0
being the network input).  :meth:`NetworkBuilder.node` turns an expression at
depth ``k`` into a new activation node of hidden layer ``k + 1`` and returns
the expression that reads that node.  Nodes may be appended to any layer at any
time, which lets identity carriers for an input be extended lazily to whatever
depth a later stage asks for.

Merging an affine read-out into the next pre-activation (the ``A_j = A_{j1}
A_{j0}`` bookkeeping of layer-by-layer constructions) happens automatically:
expressions are combined symbolically and only materialized in
:meth:`NetworkBuilder.build`.
"""
from __future__ import annotations

import itertools
from numbers import Real
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import StructureError
from .network import Activation, LayeredNetwork

__all__ = ["Expr", "NetworkBuilder", "Value", "at_depth", "lincomb"]


class Expr:
    """Affine expression ``const + sum_i terms[i] * h_depth[i]``.

    Parameters
    ----------
    depth : int
        Index of the layer whose outputs the expression reads.
    terms : dict of int to float, optional
        Node index to coefficient.
    const : float, optional
    """

    __slots__ = ("depth", "terms", "const")

    def __init__(self, depth: int, terms: dict | None = None, const: float = 0.0):
        self.depth = depth
        self.terms = terms if terms is not None else {}
        self.const = float(const)

    @property
    def is_constant(self) -> bool:
        return not any(self.terms.values())

    def __add__(self, other):
        if isinstance(other, Expr):
            if other.depth != self.depth:
                raise StructureError(
                    f"cannot add expressions from layers {self.depth} and {other.depth}"
                )
            terms = dict(self.terms)
            for k, v in other.terms.items():
                terms[k] = terms.get(k, 0.0) + v
            return Expr(self.depth, terms, self.const + other.const)
        if isinstance(other, (float, int)) or isinstance(other, Real):
            return Expr(self.depth, dict(self.terms), self.const + float(other))
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, a):
        if not (isinstance(a, (float, int)) or isinstance(a, Real)):
            return NotImplemented
        a = float(a)
        if a == 0.0:
            return Expr(self.depth, {}, 0.0)
        return Expr(self.depth, {k: a * v for k, v in self.terms.items()}, a * self.const)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __repr__(self):
        return f"Expr(depth={self.depth}, n_terms={len(self.terms)}, const={self.const:g})"


Value = Union[Expr, float]


def lincomb(depth: int, parts, const: float = 0.0) -> Expr:
    """``const + sum c * e`` over ``(c, e)`` in ``parts``, all ``e`` at ``depth``.

    Equivalent to chaining ``+`` and ``*`` but builds a single term dict.
    """
    terms: dict = {}
    for c, e in parts:
        if e.depth != depth:
            raise StructureError(f"expression lives at depth {e.depth}, needed {depth}")
        if c == 0.0:
            continue
        for k, v in e.terms.items():
            terms[k] = terms.get(k, 0.0) + c * v
        const += c * e.const
    return Expr(depth, terms, const)


def at_depth(v: Value, depth: int) -> Expr:
    """Return ``v`` as an expression at ``depth`` (constants are depth-free)."""
    if isinstance(v, Expr):
        if v.depth != depth:
            raise StructureError(f"expression lives at depth {v.depth}, needed {depth}")
        return v
    return Expr(depth, {}, float(v))


class NetworkBuilder:
    """Collects activation nodes layer by layer.

    Parameters
    ----------
    input_dim : int
        Number of network inputs.
    s : int
        Activation power.
    """

    def __init__(self, input_dim: int, s: int = 2):
        self.input_dim = int(input_dim)
        self.s = int(s)
        self._rows: list[list[Expr]] = []
        self._tags: list[set[int]] = []

    def inputs(self) -> list[Expr]:
        return [Expr(0, {i: 1.0}) for i in range(self.input_dim)]

    @property
    def depth(self) -> int:
        """Number of hidden layers that currently hold at least one node."""
        return len(self._rows)

    def node(self, pre: Expr, passthrough: bool = False) -> Expr:
        """Add the node ``sigma_s(pre)`` to layer ``pre.depth + 1``."""
        k = pre.depth
        while len(self._rows) <= k:
            self._rows.append([])
            self._tags.append(set())
        rows = self._rows[k]
        rows.append(pre)
        idx = len(rows) - 1
        if passthrough:
            self._tags[k].add(idx)
        return Expr(k + 1, {idx: 1.0})

    def width(self, layer: int) -> int:
        if layer == 0:
            return self.input_dim
        return len(self._rows[layer - 1]) if layer - 1 < len(self._rows) else 0

    def _matrix(self, exprs: Sequence[Expr], n_cols: int):
        counts = np.fromiter((len(e.terms) for e in exprs), dtype=np.int64, count=len(exprs))
        total = int(counts.sum())
        rows = np.repeat(np.arange(len(exprs)), counts)
        cols = np.fromiter(itertools.chain.from_iterable(e.terms.keys() for e in exprs), dtype=np.int64, count=total)
        vals = np.fromiter(itertools.chain.from_iterable(e.terms.values() for e in exprs), dtype=float, count=total)
        bias = np.fromiter((e.const for e in exprs), dtype=float, count=len(exprs))
        # explicit zeros are removed when the layer is stored
        A = sp.csr_matrix((vals, (rows, cols)), shape=(len(exprs), n_cols))
        return A, bias

    def build(self, outputs: Iterable[Value]) -> LayeredNetwork:
        """Materialize the network whose output layer is ``outputs``.

        All expression outputs must read the last hidden layer.  Constant
        outputs are allowed and become pure biases.
        """
        outputs = list(outputs)
        depths = {o.depth for o in outputs if isinstance(o, Expr)}
        if len(depths) > 1:
            raise StructureError(f"outputs live at different depths {sorted(depths)}")
        D = depths.pop() if depths else len(self._rows)
        if len(self._rows) > D:
            raise StructureError(f"nodes exist below the output layer (depth {len(self._rows)} > {D})")
        if len(self._rows) < D:
            raise StructureError("output reads a layer that has no nodes")
        outs = [at_depth(o, D) for o in outputs]
        layers = []
        for k, rows in enumerate(self._rows):
            layers.append(self._matrix(rows, self.width(k)))
        layers.append(self._matrix(outs, self.width(D)))
        tags = [frozenset(t) for t in self._tags]
        return LayeredNetwork(layers, Activation(self.s), tags)
