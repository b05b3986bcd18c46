"""Univariate polynomial compilers.

* :func:`compile_monomial_requ` builds ``x**n`` from the binary digits of
  ``n``: a squaring chain ``x**(2**k)`` next to a running product of the
  selected powers.
* :func:`compile_poly_requ` builds ``sum a_j x**j`` as a balanced binary tree
  of depth ``floor(log2 n) + 1``.  Coefficients are zero-padded to length
  ``2**(m+1)``; first-layer pairs ``a_{2j+1} x + a_{2j}`` are merged level by
  level as ``hi * x**(2**k) + lo`` while the carrier ``x**(2**k)`` is squared
  alongside.
* :func:`compile_poly_horner` is the sequential Horner scheme.
* :func:`compile_monomial_repu` handles general ``sigma_s`` using the base-``s``
  digits of ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .builder import Expr, NetworkBuilder, Value, at_depth
from .gadgets import (
    emit_identity,
    emit_power_below,
    emit_product,
    emit_rho,
    emit_square,
    emit_square_nonneg,
)
from .network import LayeredNetwork

__all__ = [
    "DensePolynomial1D",
    "binary_digits",
    "digits_base",
    "tree_depth",
    "emit_balanced_tree",
    "emit_balanced_trees",
    "compile_monomial_requ",
    "compile_poly_requ",
    "compile_poly_horner",
    "compile_monomial_repu",
    "horner_eval",
]


@dataclass(frozen=True)
class DensePolynomial1D:
    """Polynomial ``a_0 + a_1 x + ... + a_n x**n`` in the monomial basis.

    Trailing zero coefficients are dropped so that ``a_n != 0`` unless the
    polynomial is constant.
    """

    coefficients: tuple

    def __init__(self, coefficients: Sequence[float]):
        c = [float(a) for a in np.atleast_1d(np.asarray(coefficients, dtype=float))]
        if not c:
            c = [0.0]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return horner_eval(self.coefficients, x)

    def derivative(self) -> "DensePolynomial1D":
        c = self.coefficients
        return DensePolynomial1D([j * c[j] for j in range(1, len(c))] or [0.0])


def horner_eval(coefficients: Sequence[float], x):
    """Evaluate ``sum c_j x**j`` by Horner's rule (reference oracle)."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for c in reversed(list(coefficients)):
        acc = acc * x + c
    return acc


def _coeffs(p) -> list[float]:
    if isinstance(p, DensePolynomial1D):
        return list(p.coefficients)
    return list(DensePolynomial1D(p).coefficients)


def binary_digits(n: int) -> list[int]:
    """Binary digits ``a_0, ..., a_m`` of ``n``, least significant first."""
    return digits_base(n, 2)


def digits_base(n: int, s: int) -> list[int]:
    """Base-``s`` digits of ``n >= 1``, least significant first."""
    if n < 1 or s < 2:
        raise ValueError("need n >= 1 and s >= 2")
    out = []
    while n:
        n, r = divmod(n, s)
        out.append(r)
    return out


def _floor_log2(n: int) -> int:
    return int(n).bit_length() - 1


def tree_depth(n: int) -> int:
    """Hidden layers used by the balanced tree for degree ``n``."""
    return 0 if n <= 0 else _floor_log2(n) + 1


# ----------------------------------------------------------- monomials ----


def _emit_monomial(b: NetworkBuilder, x: Expr, n: int) -> Value:
    if n == 0:
        return 1.0
    if n == 1:
        return emit_identity(b, x)
    digits = binary_digits(n)
    m = len(digits) - 1
    xi1 = emit_square(b, x)
    if n == 1 << m:
        # all lower digits vanish: pure squaring, no running product
        for _ in range(m - 1):
            xi1 = emit_square_nonneg(b, xi1)
        return xi1
    cp = lambda a: (1.0 + (-1.0) ** a) / 2.0
    cm = lambda a: (1.0 - (-1.0) ** a) / 2.0
    xi2 = cp(digits[0]) + cm(digits[0]) * emit_identity(b, x)
    for j in range(2, m + 1):
        a = digits[j - 1]
        new_xi1 = emit_square_nonneg(b, xi1)
        xi2 = emit_product(b, cp(a) + cm(a) * xi1, xi2)
        xi1 = new_xi1
    return emit_product(b, xi1, xi2)


def compile_monomial_requ(n: int) -> LayeredNetwork:
    """ReQU network for ``x**n`` on all of R.

    Parameters
    ----------
    n : int
        Exponent, ``n >= 0``.  ``n = 0`` gives the constant network.

    Returns
    -------
    LayeredNetwork
        With ``m = floor(log2 n)``: at most ``m + 2`` layers, ``5m + 5``
        nodes and ``25m + 14`` nonzero weights.
    """
    n = int(n)
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    b = NetworkBuilder(1, 2)
    (x,) = b.inputs()
    out = _emit_monomial(b, x, n)
    return b.build([out])


# ------------------------------------------------------ balanced trees ----


def emit_balanced_trees(
    b: NetworkBuilder,
    x: Expr,
    coeff_lists: Sequence[Sequence[Value]],
    *,
    passthrough_x: bool = False,
) -> list[Value]:
    """Emit several balanced trees in ``x`` that share their carrier chain.

    Parameters
    ----------
    b : NetworkBuilder
    x : Expr
        Variable, read at ``x.depth``.
    coeff_lists : sequence of sequence
        One coefficient list per polynomial, ``a_0`` first.  Entries are
        floats or expressions living at ``x.depth`` (coefficients that are
        themselves network values).  Lists are padded to a common length.
    passthrough_x : bool
        Tag the identity copy of ``x`` as a passthrough.

    Returns
    -------
    list
        One output per polynomial, at depth ``x.depth + tree_depth(n)``, where
        ``n`` is the largest degree.  A degree-0 input is returned as is.
    """
    lists = [list(c) for c in coeff_lists]
    n = max(len(c) for c in lists) - 1
    if n == 0:
        return [c[0] for c in lists]
    m = _floor_log2(n)
    P = 2 ** (m + 1)
    lists = [c + [0.0] * (P - len(c)) for c in lists]
    t = x.depth

    idx = None

    def shared_idx():
        nonlocal idx
        if idx is None:
            idx = emit_identity(b, x, passthrough_x)
        return idx

    carrier = emit_square(b, x) if n >= 2 else None
    levels = []
    for c in lists:
        xi = []
        for j in range(P // 2):
            hi, lo = c[2 * j + 1], c[2 * j]
            if isinstance(hi, Expr):
                term = emit_product(b, x, at_depth(hi, t))
            else:
                term = hi * shared_idx()
            if isinstance(lo, Expr):
                term = term + emit_identity(b, at_depth(lo, t))
            else:
                term = term + lo
            xi.append(term)
        levels.append(xi)
    while len(levels[0]) > 1:
        nxt = [
            [
                emit_product(b, xi[2 * j + 1], carrier) + emit_identity(b, xi[2 * j])
                for j in range(len(xi) // 2)
            ]
            for xi in levels
        ]
        if len(nxt[0]) > 1:
            carrier = emit_square_nonneg(b, carrier)
        levels = nxt
    return [xi[0] for xi in levels]


def emit_balanced_tree(b: NetworkBuilder, x: Expr, coeffs: Sequence[Value]) -> Value:
    """Single-polynomial form of :func:`emit_balanced_trees`."""
    return emit_balanced_trees(b, x, [coeffs])[0]


def compile_poly_requ(p) -> LayeredNetwork:
    """ReQU network for a univariate polynomial via the balanced tree.

    Parameters
    ----------
    p : DensePolynomial1D or sequence of float
        Coefficients ``a_0 .. a_n``.

    Returns
    -------
    LayeredNetwork
        ``floor(log2 n) + 1`` hidden layers for ``n >= 1``; at most ``9n``
        nodes and ``61n`` nonzero weights.
    """
    c = _coeffs(p)
    b = NetworkBuilder(1, 2)
    (x,) = b.inputs()
    out = emit_balanced_tree(b, x, c)
    return b.build([out])


def compile_poly_horner(p) -> LayeredNetwork:
    """ReQU network following Horner's scheme, one hidden layer per step.

    ``y_n = a_{n-1} + x a_n`` and ``y_k = a_{k-1} + x y_{k+1}``; each step
    multiplies with a product gadget while ``x`` is carried alongside.
    """
    c = _coeffs(p)
    n = len(c) - 1
    if n < 1:
        raise ValueError("Horner compilation needs degree >= 1")
    b = NetworkBuilder(1, 2)
    (x,) = b.inputs()
    xk = emit_identity(b, x, passthrough=True)
    y = c[n] * xk + c[n - 1]
    for k in range(n - 1, 0, -1):
        prod = emit_product(b, xk, y)
        if k > 1:
            xk = emit_identity(b, xk, passthrough=True)
        y = prod + c[k - 1]
    return b.build([y])


# ---------------------------------------------------------- general s ----


def _emit_monomial_repu(b: NetworkBuilder, x: Expr, n: int) -> Value:
    s = b.s
    if n == 0:
        return 1.0
    if n < s:
        return emit_power_below(b, x, n)
    if n == s:
        return emit_rho(b, x)
    digits = digits_base(n, s)
    m = len(digits) - 1

    def mul(z: Value, y: Value) -> Value:
        if isinstance(z, Expr) and isinstance(y, Expr):
            return emit_product(b, z, y)
        if isinstance(z, Expr):
            return y * emit_identity(b, z)
        if isinstance(y, Expr):
            return z * emit_identity(b, y)
        return z * y

    # layer 1: xi_1 = x**s and z_1 = x**a_0; the running product starts at 1
    xi = emit_rho(b, x)
    z = emit_power_below(b, x, digits[0])
    y: Value = 1.0
    for k in range(1, m + 1):
        # layer k + 1: y_{k+1} = z_k y_k, z_{k+1} = xi_k**a_k, xi_{k+1} = xi_k**s
        y = mul(z, y)
        z = emit_power_below(b, xi, digits[k])
        if k < m:
            xi = emit_rho(b, xi)
    return mul(z, y)


def compile_monomial_repu(n: int, s: int) -> LayeredNetwork:
    """``sigma_s`` network for ``x**n`` with general power ``s >= 2``.

    ``n < s`` uses one Vandermonde layer, ``n = s`` the two-node ``rho_s`` and
    ``n > s`` the base-``s`` iteration ``xi_{k+1} = xi_k**s``,
    ``z_{k+1} = xi_k**a_k``, ``y_{k+2} = z_{k+1} y_{k+1}``.
    """
    n, s = int(n), int(s)
    if s < 2:
        raise ValueError("s must be >= 2")
    if n < 1:
        raise ValueError("exponent must be >= 1")
    b = NetworkBuilder(1, s)
    (x,) = b.inputs()
    out = _emit_monomial_repu(b, x, n)
    return b.build([out])
