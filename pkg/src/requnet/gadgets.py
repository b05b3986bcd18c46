"""One-hidden-layer building blocks for RePU networks.

Two layers of API are provided.  The ``emit_*`` functions add a gadget to a
:class:`~requnet.builder.NetworkBuilder` and return the expression of its
output; compilers use them.  The ``*_gadget`` functions return standalone
:class:`~requnet.network.LayeredNetwork` objects.

For ``s = 2`` the constants below give exact identities on all of R::

    x**2 = beta2 . sigma_2(omega2 * x)
    x*y  = beta1 . sigma_2(omega1 * x + gamma1 * y)
    x    = beta1 . sigma_2(omega1 * x + gamma1)

and, with fewer nodes on restricted domains, ``x**2 = sigma_2(x)`` for
``x >= 0`` and ``x*y = beta3 . sigma_2(omega3 * x + gamma2 * y)`` for
``x + y >= 0``.  For general ``s`` the two-node ``rho_s`` gives ``x**s`` and
lower powers come from a small Vandermonde solve.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .builder import Expr, NetworkBuilder, Value, at_depth, lincomb
from .errors import ConditioningError
from .network import LayeredNetwork

__all__ = [
    "BETA2",
    "OMEGA2",
    "BETA1",
    "OMEGA1",
    "GAMMA1",
    "BETA3",
    "OMEGA3",
    "GAMMA2",
    "VandermondeSolve",
    "solve_vandermonde",
    "emit_square",
    "emit_square_nonneg",
    "emit_product",
    "emit_product_nonneg",
    "emit_identity",
    "emit_rho",
    "emit_power_below",
    "emit_product_s",
    "square_gadget",
    "product_gadget",
    "identity_gadget",
    "square_nonneg",
    "product_nonneg",
    "rho_s_gadget",
    "monomial_below_s",
    "product_gadget_s",
]

BETA2 = (1.0, 1.0)
OMEGA2 = (1.0, -1.0)
BETA1 = (0.25, 0.25, -0.25, -0.25)
OMEGA1 = (1.0, -1.0, 1.0, -1.0)
GAMMA1 = (1.0, -1.0, -1.0, 1.0)
BETA3 = (0.25, -0.25, -0.25)
OMEGA3 = (1.0, 1.0, -1.0)
GAMMA2 = (1.0, -1.0, 1.0)

RESIDUAL_GATE = 1e-10


def _depth_of(*vals: Value) -> int:
    depths = {v.depth for v in vals if isinstance(v, Expr)}
    if len(depths) != 1:
        raise ValueError("gadget inputs must include expressions from exactly one layer")
    return depths.pop()


# ---------------------------------------------------------------- s = 2 ----


def _one_layer(b: NetworkBuilder, v: Expr, w: Expr | None, betas, omegas, gammas, passthrough) -> Expr:
    # sum_i beta_i sigma(omega_i v + gamma_i w), nodes appended in order
    d = v.depth
    out = {}
    for i, (beta, om) in enumerate(zip(betas, omegas)):
        parts = ((om, v),) if w is None else ((om, v), (gammas[i], w))
        (idx,) = b.node(lincomb(d, parts), passthrough).terms
        out[idx] = beta
    return Expr(d + 1, out)


def emit_square(b: NetworkBuilder, v: Expr, passthrough: bool = False) -> Expr:
    """``v**2`` with two nodes (any sign of ``v``)."""
    return _one_layer(b, v, None, BETA2, OMEGA2, None, passthrough)


def emit_square_nonneg(b: NetworkBuilder, v: Expr, passthrough: bool = False) -> Expr:
    """``v**2`` with one node; exact only where ``v >= 0``."""
    return b.node(v, passthrough)


def emit_product(b: NetworkBuilder, v: Value, w: Value, passthrough: bool = False) -> Expr:
    """``v * w`` with four nodes; either factor may be a constant."""
    d = _depth_of(v, w)
    v, w = at_depth(v, d), at_depth(w, d)
    if b.s != 2:
        return emit_product_s(b, v, w, passthrough)
    return _one_layer(b, v, w, BETA1, OMEGA1, GAMMA1, passthrough)


def emit_product_nonneg(b: NetworkBuilder, v: Expr, w: Expr, passthrough: bool = False) -> Expr:
    """``v * w`` with three nodes; exact where ``v + w >= 0``."""
    d = _depth_of(v, w)
    return _one_layer(b, at_depth(v, d), at_depth(w, d), BETA3, OMEGA3, GAMMA2, passthrough)


def emit_identity(b: NetworkBuilder, v: Expr, passthrough: bool = False) -> Expr:
    """Carry ``v`` one layer forward (4 nodes for ``s = 2``, ``2s`` otherwise)."""
    if b.s == 2:
        return emit_product(b, v, 1.0, passthrough)
    return emit_power_below(b, v, 1, passthrough)


# ------------------------------------------------------------ general s ----


def emit_rho(b: NetworkBuilder, v: Expr, passthrough: bool = False) -> Expr:
    """``v**s = sigma_s(v) + (-1)**s sigma_s(-v)`` with two nodes."""
    sign = -1.0 if b.s % 2 else 1.0
    return b.node(v, passthrough) + sign * b.node(-v, passthrough)


@dataclass(frozen=True)
class VandermondeSolve:
    """Coefficients of ``x**n = a_0 + sum_k a_k rho_s(x + b_k)``.

    Attributes
    ----------
    s, n : int
    nodes : tuple of float
        Shifts ``b_1 .. b_s``.
    coefficients : tuple of float
        ``(a_0, a_1, ..., a_s)``.
    residual : float
        Max-norm residual of the solved linear system.
    condition : float
        2-norm condition number of the system matrix.
    """

    s: int
    n: int
    nodes: tuple
    coefficients: tuple
    residual: float
    condition: float


def _system(s: int, n: int, nodes: np.ndarray):
    # Row j matches the coefficient of x**j; unknowns are (a_1..a_s, a_0).
    D = np.zeros((s + 1, s + 1))
    rhs = np.zeros(s + 1)
    for j in range(s + 1):
        D[j, :s] = comb(s, j) * nodes ** (s - j)
    D[0, s] = 1.0
    rhs[n] = 1.0
    return D, rhs


@lru_cache(maxsize=None)
def _solve_cached(s: int, n: int, nodes: tuple) -> VandermondeSolve:
    bk = np.asarray(nodes, dtype=float)
    D, rhs = _system(s, n, bk)
    sol = np.linalg.solve(D, rhs)
    # one step of iterative refinement
    sol = sol + np.linalg.solve(D, rhs - D @ sol)
    residual = float(np.max(np.abs(D @ sol - rhs)))
    cond = float(np.linalg.cond(D))
    if not np.isfinite(residual) or residual > RESIDUAL_GATE:
        raise ConditioningError(
            f"Vandermonde solve for s={s}, n={n} has residual {residual:.3e} "
            f"(condition estimate {cond:.3e})"
        )
    coeffs = (float(sol[s]),) + tuple(float(a) for a in sol[:s])
    return VandermondeSolve(s, n, tuple(float(x) for x in bk), coeffs, residual, cond)


def solve_vandermonde(s: int, n: int, nodes=None) -> VandermondeSolve:
    """Solve for the coefficients representing ``x**n`` with ``sigma_s``.

    Parameters
    ----------
    s : int
        Activation power, ``s >= 2``.
    n : int
        Target exponent, ``1 <= n < s``.
    nodes : sequence of float, optional
        Distinct shifts ``b_1 .. b_s``; equidistant on ``[-1, 1]`` by default.

    Returns
    -------
    VandermondeSolve

    Raises
    ------
    ConditioningError
        If the solve residual exceeds ``1e-10``.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if not 1 <= n < s:
        raise ValueError(f"need 1 <= n < s, got n={n}, s={s}")
    if nodes is None:
        nodes = np.linspace(-1.0, 1.0, s)
    nodes = tuple(float(x) for x in nodes)
    if len(nodes) != s or len(set(nodes)) != s:
        raise ValueError("need s distinct nodes")
    return _solve_cached(s, n, nodes)


def emit_power_below(b: NetworkBuilder, v: Expr, n: int, passthrough: bool = False) -> Value:
    """``v**n`` for ``0 <= n < s`` (``n = 0`` gives the constant 1)."""
    if n == 0:
        return 1.0
    if n == b.s:
        return emit_rho(b, v, passthrough)
    sol = solve_vandermonde(b.s, n)
    out = Expr(v.depth + 1, {}, sol.coefficients[0])
    for a, shift in zip(sol.coefficients[1:], sol.nodes):
        if a != 0.0:
            out = out + a * emit_rho(b, v + shift, passthrough)
    return out


def emit_product_s(b: NetworkBuilder, y: Value, z: Value, passthrough: bool = False) -> Expr:
    """``y * z = ((y+z)**2 - (y-z)**2) / 4`` using ``sigma_s`` squares."""
    d = _depth_of(y, z)
    y, z = at_depth(y, d), at_depth(z, d)
    sq = (lambda u: emit_rho(b, u, passthrough)) if b.s == 2 else (
        lambda u: emit_power_below(b, u, 2, passthrough)
    )
    return 0.25 * sq(y + z) - 0.25 * sq(y - z)


# ------------------------------------------------------ standalone nets ----


def _one_input(s: int, f) -> LayeredNetwork:
    b = NetworkBuilder(1, s)
    (x,) = b.inputs()
    return b.build([f(b, x)])


def _two_inputs(s: int, f) -> LayeredNetwork:
    b = NetworkBuilder(2, s)
    x, y = b.inputs()
    return b.build([f(b, x, y)])


def square_gadget() -> LayeredNetwork:
    """``x -> x**2`` (1 hidden layer, 2 nodes)."""
    return _one_input(2, emit_square)


def product_gadget() -> LayeredNetwork:
    """``(x, y) -> x*y`` (1 hidden layer, 4 nodes)."""
    return _two_inputs(2, emit_product)


def identity_gadget(s: int = 2) -> LayeredNetwork:
    """``x -> x`` in one hidden layer."""
    return _one_input(s, emit_identity)


def square_nonneg() -> LayeredNetwork:
    """``x -> x**2`` for ``x >= 0`` (1 node)."""
    return _one_input(2, emit_square_nonneg)


def product_nonneg() -> LayeredNetwork:
    """``(x, y) -> x*y`` for ``x + y >= 0`` (3 nodes)."""
    return _two_inputs(2, emit_product_nonneg)


def rho_s_gadget(s: int) -> LayeredNetwork:
    """``x -> x**s`` with two ``sigma_s`` nodes."""
    return _one_input(s, emit_rho)


def monomial_below_s(n: int, s: int) -> LayeredNetwork:
    """``x -> x**n`` for ``1 <= n < s`` with at most ``2s`` nodes."""
    if not 1 <= n < s:
        raise ValueError(f"need 1 <= n < s, got n={n}, s={s}")
    return _one_input(s, lambda b, x: emit_power_below(b, x, n))


def product_gadget_s(s: int) -> LayeredNetwork:
    """``(y, z) -> y*z`` with at most ``4s`` ``sigma_s`` nodes."""
    if s < 2:
        raise ValueError("s must be >= 2")
    return _two_inputs(s, emit_product_s)
