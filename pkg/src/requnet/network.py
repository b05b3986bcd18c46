"""Layered RePU networks: data model, evaluation, complexity and combinators.

A network is the sequence ``((A_1, b_1), ..., (A_L, b_L))`` together with an
activation power ``s``.  The activation ``sigma_s`` is applied after layers
``1 .. L-1``; the final layer is affine only.  Weight matrices are stored as
``scipy.sparse`` CSR matrices because the compiled networks are wide and very
sparse (a degree-63 tensor polynomial has layers with thousands of nodes).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ShapeError, StructureError

__all__ = [
    "Activation",
    "LayeredNetwork",
    "ComplexityReport",
    "activate",
    "evaluate",
    "evaluate_batch",
    "complexity",
    "compose",
    "parallel",
    "identity_passthrough",
]


@dataclass(frozen=True)
class Activation:
    """Rectified power unit ``sigma_s(x) = max(x, 0) ** s``.

    Parameters
    ----------
    s : int
        Positive integer power.  ``s = 1`` is ReLU and ``s = 2`` is ReQU.
    """

    s: int = 2

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1:
            raise ValueError(f"activation power must be a positive integer, got {self.s!r}")

    def __call__(self, x):
        return activate(self.s, x)


def activate(s: int, x):
    """Apply ``sigma_s`` elementwise.

    Parameters
    ----------
    s : int
        Power, ``s >= 1``.
    x : float or array_like
        Input value(s).

    Returns
    -------
    float or ndarray
        ``x**s`` where ``x >= 0`` and ``0`` elsewhere.
    """
    if s < 1:
        raise ValueError("activation power must be >= 1")
    arr = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = arr if s == 1 else arr**s
    if np.ndim(out) == 0:
        return float(out)
    return out


def _as_csr(A) -> sp.csr_matrix:
    if sp.issparse(A):
        M = sp.csr_matrix(A, dtype=float)
    else:
        arr = np.asarray(A, dtype=float)
        if arr.ndim != 2:
            raise ShapeError(f"weight matrix must be 2-d, got shape {arr.shape}")
        M = sp.csr_matrix(arr)
    M.sum_duplicates()
    M.eliminate_zeros()
    M.sort_indices()
    return M


@dataclass(frozen=True, eq=False)
class LayeredNetwork:
    """An immutable ``sigma_s`` network.

    Parameters
    ----------
    layers : sequence of (A, b)
        ``A_k`` has shape ``(N_k, N_{k-1})`` and ``b_k`` has length ``N_k``.
        Dense arrays and sparse matrices are both accepted.
    activation : Activation
        Activation applied after every layer except the last.
    passthrough : sequence of frozenset of int, optional
        For every hidden layer, the row indices of nodes that only carry a
        value forward (identity passthroughs used for depth alignment).  They
        are part of the network and of its counts; they are tracked so that
        reports can show the alignment cost separately.
    """

    layers: tuple
    activation: Activation = field(default_factory=Activation)
    passthrough: tuple = ()

    def __init__(self, layers, activation: Activation | int = 2, passthrough=None):
        if isinstance(activation, (int, np.integer)):
            activation = Activation(int(activation))
        checked = []
        prev = None
        for k, (A, b) in enumerate(layers):
            M = _as_csr(A)
            bias = np.asarray(b, dtype=float).reshape(-1)
            if bias.shape[0] != M.shape[0]:
                raise ShapeError(
                    f"layer {k + 1}: bias length {bias.shape[0]} does not match {M.shape[0]} rows"
                )
            if prev is not None and M.shape[1] != prev:
                raise ShapeError(
                    f"layer {k + 1}: expects {M.shape[1]} inputs but layer {k} has {prev} outputs"
                )
            bias.setflags(write=False)
            checked.append((M, bias))
            prev = M.shape[0]
        if not checked:
            raise StructureError("a network needs at least one layer")
        n_hidden = len(checked) - 1
        if passthrough is None or len(passthrough) == 0:
            pt = tuple(frozenset() for _ in range(n_hidden))
        else:
            if len(passthrough) != n_hidden:
                raise StructureError("passthrough tags must be given for every hidden layer")
            pt = tuple(frozenset(int(i) for i in rows) for rows in passthrough)
        object.__setattr__(self, "layers", tuple(checked))
        object.__setattr__(self, "activation", activation)
        object.__setattr__(self, "passthrough", pt)

    @property
    def s(self) -> int:
        return self.activation.s

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @property
    def widths(self) -> list[int]:
        """Layer widths ``[N_0, N_1, ..., N_L]``."""
        return [self.input_dim] + [A.shape[0] for A, _ in self.layers]

    def __call__(self, x):
        return evaluate(self, x)

    def equals(self, other: "LayeredNetwork") -> bool:
        """Bit-exact structural equality (dimensions, entries, power, tags)."""
        if self.s != other.s or len(self.layers) != len(other.layers):
            return False
        if self.passthrough != other.passthrough:
            return False
        for (A, b), (B, c) in zip(self.layers, other.layers):
            if A.shape != B.shape or not np.array_equal(b, c):
                return False
            if (A != B).nnz:
                return False
        return True


@dataclass(frozen=True)
class ComplexityReport:
    """Size of a network.

    ``nodes`` and ``nonzero_weights`` count the whole network.  The
    ``passthrough_*`` fields give the share of those totals that belongs to
    identity passthrough rows, so comparisons can include or exclude it.
    """

    hidden_layers: int
    total_layers: int
    nodes: int
    nonzero_weights: int
    passthrough_nodes: int = 0
    passthrough_weights: int = 0

    @property
    def nodes_without_passthrough(self) -> int:
        return self.nodes - self.passthrough_nodes

    @property
    def weights_without_passthrough(self) -> int:
        return self.nonzero_weights - self.passthrough_weights

    def as_dict(self) -> dict:
        return {
            "hidden_layers": self.hidden_layers,
            "total_layers": self.total_layers,
            "nodes": self.nodes,
            "nonzero_weights": self.nonzero_weights,
            "passthrough_nodes": self.passthrough_nodes,
            "passthrough_weights": self.passthrough_weights,
        }


def complexity(net: LayeredNetwork) -> ComplexityReport:
    """Count layers, activation nodes and strictly nonzero parameters.

    Parameters
    ----------
    net : LayeredNetwork

    Returns
    -------
    ComplexityReport
    """
    L = len(net.layers)
    nodes = sum(A.shape[0] for A, _ in net.layers[:-1])
    weights = 0
    pt_nodes = 0
    pt_weights = 0
    for k, (A, b) in enumerate(net.layers):
        # explicit zeros are dropped when a layer is stored, so nnz is exact
        row_nnz = np.diff(A.indptr) + (b != 0)
        weights += int(row_nnz.sum())
        if k < L - 1 and net.passthrough[k]:
            rows = np.fromiter(net.passthrough[k], dtype=int)
            pt_nodes += len(rows)
            pt_weights += int(row_nnz[rows].sum())
    return ComplexityReport(L - 1, L, nodes, weights, pt_nodes, pt_weights)


def _forward(net: LayeredNetwork, H: np.ndarray) -> np.ndarray:
    # H has shape (N_0, batch)
    s = net.s
    last = len(net.layers) - 1
    for k, (A, b) in enumerate(net.layers):
        H = A @ H + b[:, None]
        if k < last:
            np.maximum(H, 0.0, out=H)
            if s == 2:
                H = H * H
            elif s != 1:
                H = H**s
    return H


def evaluate(net: LayeredNetwork, x) -> np.ndarray:
    """Evaluate the network at one input vector.

    Parameters
    ----------
    net : LayeredNetwork
    x : array_like, shape (input_dim,)
        A scalar is accepted when ``input_dim == 1``.

    Returns
    -------
    ndarray, shape (output_dim,)
    """
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or v.shape[0] != net.input_dim:
        raise ShapeError(f"expected input of length {net.input_dim}, got shape {np.shape(x)}")
    return _forward(net, v[:, None])[:, 0]


def evaluate_batch(net: LayeredNetwork, X, workers: int | None = None) -> np.ndarray:
    """Evaluate at many inputs.

    Parameters
    ----------
    net : LayeredNetwork
    X : array_like, shape (n_points, input_dim)
        A 1-d array is read as ``n_points`` scalar inputs when
        ``input_dim == 1``.
    workers : int, optional
        Split the batch into this many chunks evaluated on a thread pool.
        The result does not depend on the number of workers.

    Returns
    -------
    ndarray, shape (n_points, output_dim)
    """
    arr = np.asarray(X, dtype=float)
    if arr.size == 0:
        return np.zeros((0, net.output_dim))
    if arr.ndim == 1:
        if net.input_dim != 1:
            raise ShapeError(f"expected points of length {net.input_dim}")
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != net.input_dim:
        raise ShapeError(f"expected shape (n, {net.input_dim}), got {arr.shape}")
    if not workers or workers <= 1 or arr.shape[0] < 2 * workers:
        return _forward(net, arr.T.copy()).T
    chunks = np.array_split(arr, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _forward(net, c.T.copy()).T, chunks))
    return np.vstack(parts)


def compose(first: LayeredNetwork, second: LayeredNetwork) -> LayeredNetwork:
    """Serial composition ``x -> second(first(x))``.

    The affine output layer of ``first`` is merged into the first affine map
    of ``second``, so the hidden-layer count is the sum of both.
    """
    if first.s != second.s:
        raise StructureError("cannot compose networks with different activation powers")
    if first.output_dim != second.input_dim:
        raise ShapeError(
            f"first network has {first.output_dim} outputs, second expects {second.input_dim}"
        )
    A1, b1 = first.layers[-1]
    A2, b2 = second.layers[0]
    merged = ((A2 @ A1).tocsr(), A2 @ b1 + b2)
    layers = list(first.layers[:-1]) + [merged] + list(second.layers[1:])
    pt = list(first.passthrough)
    if len(second.layers) > 1:
        pt += list(second.passthrough)
    return LayeredNetwork(layers, first.activation, pt)


def parallel(
    nets: Sequence[LayeredNetwork],
    wiring: Sequence[Sequence[int]] | None = None,
    input_dim: int | None = None,
) -> LayeredNetwork:
    """Stack networks of equal depth side by side.

    Parameters
    ----------
    nets : sequence of LayeredNetwork
        All must share the activation power and the number of layers.
    wiring : sequence of sequence of int, optional
        ``wiring[i][j]`` is the index of the shared input that feeds input
        ``j`` of ``nets[i]``.  By default inputs are disjoint and
        concatenated in order.
    input_dim : int, optional
        Number of shared inputs when ``wiring`` is given (defaults to
        ``1 + max`` index used).

    Returns
    -------
    LayeredNetwork
        Outputs are the concatenation of the branch outputs.
    """
    nets = list(nets)
    if not nets:
        raise StructureError("parallel needs at least one network")
    s = nets[0].s
    depth = len(nets[0].layers)
    for i, n in enumerate(nets):
        if n.s != s:
            raise StructureError(f"branch {i} has activation power {n.s}, expected {s}")
        if len(n.layers) != depth:
            raise StructureError(
                f"branch {i} has {len(n.layers)} layers, expected {depth}; pad with identity_passthrough"
            )
    if wiring is None:
        offsets = np.cumsum([0] + [n.input_dim for n in nets])
        wiring = [list(range(offsets[i], offsets[i + 1])) for i in range(len(nets))]
        n_in = int(offsets[-1])
    else:
        if len(wiring) != len(nets):
            raise StructureError("wiring must have one entry per branch")
        for i, (w, n) in enumerate(zip(wiring, nets)):
            if len(w) != n.input_dim:
                raise StructureError(f"wiring for branch {i} has {len(w)} entries, needs {n.input_dim}")
        n_in = input_dim if input_dim is not None else 1 + max(max(w) for w in wiring if len(w))
    layers = []
    for k in range(depth):
        blocks = []
        if k == 0:
            for n, w in zip(nets, wiring):
                A = n.layers[0][0].tocoo()
                cols = np.asarray(w, dtype=int)[A.col]
                blocks.append(sp.csr_matrix((A.data, (A.row, cols)), shape=(A.shape[0], n_in)))
            A = sp.vstack(blocks).tocsr()
        else:
            A = sp.block_diag([n.layers[k][0] for n in nets]).tocsr()
        b = np.concatenate([n.layers[k][1] for n in nets])
        layers.append((A, b))
    pt = []
    for k in range(depth - 1):
        rows = set()
        off = 0
        for n in nets:
            rows.update(off + r for r in n.passthrough[k])
            off += n.layers[k][0].shape[0]
        pt.append(frozenset(rows))
    return LayeredNetwork(layers, Activation(s), pt)


def identity_passthrough(s: int, width: int, depth: int) -> LayeredNetwork:
    """A network that returns its input after ``depth`` hidden layers.

    For ``s = 2`` each scalar uses the 4-node identity
    ``x = beta_1^T sigma_2(omega_1 x + gamma_1)``; for general ``s`` it uses
    the one-layer realization of ``x**1`` from the Vandermonde construction.
    With ``depth = 0`` the result is the affine identity map.
    """
    from .builder import NetworkBuilder
    from .gadgets import emit_identity

    if width < 0 or depth < 0:
        raise ValueError("width and depth must be nonnegative")
    b = NetworkBuilder(width, s)
    outs = []
    for v in b.inputs():
        for _ in range(depth):
            v = emit_identity(b, v, passthrough=True)
        outs.append(v)
    return b.build(outs)
