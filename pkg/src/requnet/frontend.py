"""Function approximation front end, convergence harness and table verifier.

A smooth function is sampled at Chebyshev-Gauss-Lobatto points, its
interpolant is converted to monomial coefficients and the polynomial is
compiled into a ReQU network.  The network reproduces the polynomial up to
roundoff, so the measured error to ``f`` is the interpolation error.
"""
from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConditioningError, ContractError
from .indexsets import IndexSet, full_box_indices, hyperbolic_cross_indices
from .network import ComplexityReport, LayeredNetwork, complexity, evaluate_batch
from .poly1d import DensePolynomial1D, compile_monomial_requ, compile_poly_requ, horner_eval
from .polymd import (
    SparsePolynomialMD,
    compile_downward_closed,
    compile_tensor_product,
    monomial_sum,
)
from .sparsegrid import (
    COEFFICIENT_GATE,
    cgl_nodes,
    cheb_to_monomial_matrix,
    chebyshev_to_monomial,
    chebyshev_values_to_coefficients,
    interpolant_to_polynomial,
    smolyak_interpolate,
)

__all__ = [
    "ConvergenceRecord",
    "chebyshev_interpolate_1d",
    "chebyshev_interpolate_tensor",
    "chebyshev_truncate",
    "compile_function_1d",
    "convergence_study",
    "records_to_csv",
    "CSV_HEADER",
    "MODES",
    "BUILTIN_FUNCTIONS",
    "TableRow",
    "TableReport",
    "PUBLISHED_TABLES",
    "verify_tables",
]

CSV_HEADER = ("N", "max_error", "l2_error", "layers", "nodes", "weights", "seconds")
MODES = ("1d", "tensor_2d", "hyperbolic_2d", "sparse_grid")
TABLE_POINTS = 100
CONVERGENCE_POINTS = 10_000


def _prod_of(g):
    return lambda X: np.prod(g(np.atleast_2d(X)), axis=1)


# Functions on [-1, 1]^d, taking an array of shape (n, d).  Each is a
# product or a function of the sum of the coordinates so that the same name
# works in any dimension.
BUILTIN_FUNCTIONS: dict[str, Callable] = {
    "sin": _prod_of(np.sin),
    "cos": _prod_of(np.cos),
    "exp": lambda X: np.exp(np.sum(np.atleast_2d(X), axis=1)),
    "runge": _prod_of(lambda x: 1.0 / (1.0 + 25.0 * x * x)),
}


@dataclass
class ConvergenceRecord:
    """Error and cost of one approximation level.

    Attributes
    ----------
    N : int
        Degree (``1d``, ``tensor_2d``, ``hyperbolic_2d``) or Smolyak level
        ``q`` (``sparse_grid``).
    max_error, l2_error : float
        Maximum and root-mean-square error of the network against ``f`` on
        the sample.
    complexity : ComplexityReport
    seconds : float
        Wall time for interpolation, compilation and evaluation.
    """

    N: int
    max_error: float
    l2_error: float
    complexity: ComplexityReport
    seconds: float

    def __post_init__(self):
        if not self.max_error >= 0:
            raise ValueError("max_error must be nonnegative")


# --------------------------------------------------------- interpolation ----


def _as_1d_function(f: Callable) -> Callable:
    def g(x):
        return np.asarray(f(np.asarray(x, dtype=float)), dtype=float).reshape(-1)

    return g


def chebyshev_interpolate_1d(f: Callable, N: int) -> DensePolynomial1D:
    """Degree ``N`` interpolant of ``f`` at the ``N + 1`` CGL points.

    Parameters
    ----------
    f : callable
        Vectorized function of one variable on ``[-1, 1]``.
    N : int
        Degree, ``N >= 0``.  ``N = 0`` interpolates at the origin.

    Returns
    -------
    DensePolynomial1D
        Monomial coefficients ``a_0 .. a_N``.

    Raises
    ------
    ConditioningError
        If a monomial coefficient exceeds ``1e12`` in magnitude; use a lower
        ``N``.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be >= 0")
    x = np.array(cgl_nodes(N + 1))
    vals = _as_1d_function(f)(x)
    cheb = chebyshev_values_to_coefficients(vals)
    return DensePolynomial1D(chebyshev_to_monomial(cheb))


def chebyshev_interpolate_tensor(f: Callable, N: int, d: int) -> np.ndarray:
    """Chebyshev coefficients of the tensor CGL interpolant of degree ``N`` per axis.

    ``f`` takes points of shape ``(n, d)``.  Returns an array of shape
    ``(N + 1,) * d`` whose entry ``k`` multiplies ``T_{k_1} ... T_{k_d}``.
    """
    x = np.array(cgl_nodes(N + 1))
    grid = np.array(list(itertools.product(x, repeat=d)))
    vals = np.asarray(f(grid), dtype=float).reshape((N + 1,) * d)
    coef = vals
    for j in range(d):
        coef = np.moveaxis(chebyshev_values_to_coefficients(np.moveaxis(coef, j, 0)), 0, j)
    return coef


def chebyshev_truncate(coef: np.ndarray, support: IndexSet) -> SparsePolynomialMD:
    """Keep the tensor Chebyshev coefficients on ``support`` and convert to monomials.

    ``support`` must be downward closed so that the monomial expansion stays
    inside it.

    Raises
    ------
    ConditioningError
        If a monomial coefficient exceeds ``1e12`` in magnitude.
    """
    d = coef.ndim
    mask = np.zeros(coef.shape, dtype=bool)
    for k in support:
        mask[k] = True
    mono = np.where(mask, coef, 0.0)
    for j in range(d):
        M = cheb_to_monomial_matrix(coef.shape[j])
        mono = np.moveaxis(np.tensordot(M, mono, axes=([1], [j])), 0, j)
    peak = float(np.max(np.abs(mono), initial=0.0))
    if peak > COEFFICIENT_GATE:
        raise ConditioningError(f"monomial coefficients reach {peak:.3e}; lower N")
    return SparsePolynomialMD(d, {k: float(mono[k]) for k in support}, support)


def compile_function_1d(f: Callable, N: int, s: int = 2) -> LayeredNetwork:
    """Compile the degree ``N`` CGL interpolant of ``f`` into a ReQU network.

    Only ``s = 2`` is supported; other powers raise ``ContractError``.
    """
    if s != 2:
        raise ContractError("function compilation supports s = 2 only")
    return compile_poly_requ(chebyshev_interpolate_1d(f, N))


# ------------------------------------------------------------ harness ----


def _compile_mode(f: Callable, N: int, mode: str, d: int) -> LayeredNetwork:
    if mode == "1d":
        g = lambda x: f(np.asarray(x).reshape(-1, 1))
        return compile_poly_requ(chebyshev_interpolate_1d(g, N))
    if mode == "tensor_2d":
        coef = chebyshev_interpolate_tensor(f, N, d)
        p = chebyshev_truncate(coef, full_box_indices(N, d))
        return compile_tensor_product(p, N)
    if mode == "hyperbolic_2d":
        coef = chebyshev_interpolate_tensor(f, N, d)
        p = chebyshev_truncate(coef, hyperbolic_cross_indices(N, d))
        return compile_downward_closed(p)
    if mode == "sparse_grid":
        return compile_downward_closed(interpolant_to_polynomial(smolyak_interpolate(f, N, d)))
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def convergence_study(
    f: Callable,
    N_list: Sequence[int],
    mode: str = "1d",
    *,
    d: int | None = None,
    seed: int = 0,
    n_samples: int = CONVERGENCE_POINTS,
    workers: int | None = None,
) -> list[ConvergenceRecord]:
    """Measure network error against ``f`` for each ``N``.

    Parameters
    ----------
    f : callable
        Takes points of shape ``(n, d)`` and returns ``n`` values.
    N_list : sequence of int
        Degrees, or Smolyak levels ``q >= d`` for ``mode="sparse_grid"``.
    mode : {"1d", "tensor_2d", "hyperbolic_2d", "sparse_grid"}
    d : int, optional
        Dimension; 1 for ``"1d"`` and 2 otherwise by default.
    seed : int
        Seed of the uniform sample on ``[-1, 1]^d``.
    n_samples : int
    workers : int, optional
        Compile the levels on a thread pool.  Records come back in ascending
        ``N`` regardless.

    Returns
    -------
    list of ConvergenceRecord, sorted by ``N``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if d is None:
        d = 1 if mode == "1d" else 2
    if mode == "1d" and d != 1:
        raise ValueError("mode '1d' needs d = 1")
    X = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n_samples, d))
    exact = np.asarray(f(X), dtype=float).reshape(-1)

    def run(N: int) -> ConvergenceRecord:
        t0 = time.perf_counter()
        net = _compile_mode(f, int(N), mode, d)
        approx = evaluate_batch(net, X)[:, 0]
        err = np.abs(approx - exact)
        return ConvergenceRecord(
            int(N),
            float(err.max()),
            float(np.sqrt(np.mean(err**2))),
            complexity(net),
            time.perf_counter() - t0,
        )

    levels = sorted(set(int(N) for N in N_list))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, levels))
    return [run(N) for N in levels]


def records_to_csv(records: Sequence[ConvergenceRecord], timing: bool = True) -> str:
    """Render records with the header ``N,max_error,l2_error,layers,nodes,weights,seconds``.

    Floats use the shortest round-trip representation.  With
    ``timing=False`` the ``seconds`` column is written as ``0`` so that
    repeated runs are byte-identical.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        c = r.complexity
        w.writerow(
            [
                r.N,
                repr(r.max_error),
                repr(r.l2_error),
                c.total_layers,
                c.nodes,
                c.nonzero_weights,
                repr(r.seconds) if timing else "0",
            ]
        )
    return buf.getvalue()


# ------------------------------------------------------ table verifier ----

# Published rows: key -> (total layers, weights, nodes, max error)
PUBLISHED_TABLES: dict[str, dict[int, tuple]] = {
    "monomial": {
        3: (3, 38, 10, 4.44e-16),
        7: (4, 64, 15, 2.22e-16),
        15: (5, 89, 20, 9.99e-16),
        31: (6, 114, 25, 7.77e-16),
        63: (7, 139, 30, 6.11e-16),
        127: (8, 164, 35, 2.22e-16),
    },
    "poly1d": {
        3: (3, 66, 14, 1.78e-15),
        7: (4, 188, 31, 1.78e-15),
        15: (5, 429, 64, 4.44e-15),
        31: (6, 910, 129, 5.33e-15),
        63: (7, 1871, 258, 5.33e-15),
        127: (8, 3792, 515, 5.33e-15),
    },
    "tensor2d": {
        3: (5, 378, 64, 1.11e-15),
        7: (7, 1570, 246, 8.88e-15),
        15: (9, 6376, 988, 1.60e-14),
        31: (11, 25758, 4002, 7.11e-14),
        63: (13, 103668, 16168, 8.88e-14),
    },
    "hyperbolic2d": {
        7: (7, 1254, 217, 3.55e-15),
        15: (9, 3277, 554, 1.24e-14),
        31: (11, 8022, 1351, 5.32e-14),
        63: (13, 19039, 3196, 2.24e-14),
        127: (15, 44052, 7393, 4.26e-14),
    },
}

TABLE_TITLES = {
    "monomial": "Table 1 (monomials x^n)",
    "poly1d": "Table 2 (univariate polynomials)",
    "tensor2d": "Table 3 (tensor product Q_N^2)",
    "hyperbolic2d": "Table 4 (hyperbolic cross, d=2)",
}

# Per table: error ceiling and runtime ceiling (seconds, whole table).
TABLE_LIMITS = {
    "monomial": (1e-12, 1.0),
    "poly1d": (1e-12, 1.0),
    "tensor2d": (1e-11, 30.0),
    "hyperbolic2d": (1e-11, 30.0),
}


@dataclass
class TableRow:
    """One regenerated row with its checks (name to pass flag)."""

    table: str
    key: int
    complexity: ComplexityReport
    max_error: float
    seconds: float
    published: tuple
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass
class TableReport:
    rows: list
    table_seconds: dict
    table_checks: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(self.table_checks.values())

    def failing_rows(self) -> list:
        return [r for r in self.rows if not r.passed]

    def format(self) -> str:
        lines = []
        for table, title in TABLE_TITLES.items():
            lines.append(f"{title}  [{self.table_seconds[table]:.3f} s]")
            lines.append(
                f"  {'key':>5} {'L':>3} {'ref L':>7} {'nodes':>7} {'ref':>7} "
                f"{'weights':>8} {'ref':>8} {'error':>10}  status"
            )
            for r in self.rows:
                if r.table != table:
                    continue
                L, W, Nn, _ = r.published
                c = r.complexity
                bad = [k for k, ok in r.checks.items() if not ok]
                status = "PASS" if not bad else "FAIL " + ",".join(bad)
                lines.append(
                    f"  {r.key:>5} {c.total_layers:>3} {L:>7} {c.nodes:>7} {Nn:>7} "
                    f"{c.nonzero_weights:>8} {W:>8} {r.max_error:>10.2e}  {status}"
                )
            ok = self.table_checks[table]
            lines.append(f"  runtime check: {'PASS' if ok else 'FAIL'}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _within(value: float, target: float, rel: float) -> bool:
    return abs(value - target) <= rel * abs(target)


def _table_row(table: str, key: int, rng: np.random.Generator, X1: np.ndarray, X2: np.ndarray) -> TableRow:
    t0 = time.perf_counter()
    if table == "monomial":
        net = compile_monomial_requ(key)
        err = np.max(np.abs(evaluate_batch(net, X1)[:, 0] - X1**key))
    elif table == "poly1d":
        c = rng.standard_normal(key + 1)
        net = compile_poly_requ(c)
        err = np.max(np.abs(evaluate_batch(net, X1)[:, 0] - horner_eval(c, X1)))
    else:
        S = full_box_indices(key, 2) if table == "tensor2d" else hyperbolic_cross_indices(key, 2)
        coef = rng.standard_normal(len(S))
        terms = dict(zip(S.members, coef))
        p = SparsePolynomialMD(2, terms, S)
        net = compile_tensor_product(p, key) if table == "tensor2d" else compile_downward_closed(p)
        err = np.max(np.abs(evaluate_batch(net, X2)[:, 0] - monomial_sum(terms, X2)))
    seconds = time.perf_counter() - t0
    c = complexity(net)
    published = PUBLISHED_TABLES[table][key]
    L, W, Nn, _ = published
    tol = TABLE_LIMITS[table][0]
    checks = {"layers": c.total_layers == L, "error": bool(err <= tol)}
    if table == "monomial":
        m = int(key).bit_length() - 1
        checks["nodes"] = c.nodes == 5 * m + 5 == Nn
        checks["weights"] = abs(c.nonzero_weights - W) <= 2
    elif table == "poly1d":
        checks["nodes"] = c.nodes <= 9 * key and _within(c.nodes, Nn, 0.05)
        checks["weights"] = c.nonzero_weights <= 61 * key and _within(c.nonzero_weights, W, 0.05)
    else:
        checks["nodes"] = _within(c.nodes, Nn, 0.10)
        checks["weights"] = _within(c.nonzero_weights, W, 0.10)
    return TableRow(table, key, c, float(err), seconds, published, checks)


def verify_tables(seed: int = 0, workers: int | None = None) -> TableReport:
    """Regenerate the four published complexity tables and check them.

    Coefficients are standard normal from ``numpy.random.default_rng(seed)``
    (one child stream per row); errors are measured at 100 uniform random
    points of ``[-1, 1]`` or ``[-1, 1]^2``.  Node and weight counts include
    passthrough carriers.

    Parameters
    ----------
    seed : int
    workers : int, optional
        Run rows on a thread pool.  Row order in the report is fixed.
        The per-table runtime check sums row times, so it is unaffected.
    """
    root = np.random.default_rng(seed)
    X1 = root.uniform(-1.0, 1.0, TABLE_POINTS)
    X2 = root.uniform(-1.0, 1.0, (TABLE_POINTS, 2))
    jobs = [(t, k) for t in PUBLISHED_TABLES for k in PUBLISHED_TABLES[t]]
    streams = root.spawn(len(jobs))

    def run(i):
        t, k = jobs[i]
        return _table_row(t, k, streams[i], X1, X2)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, range(len(jobs))))
    else:
        rows = [run(i) for i in range(len(jobs))]
    table_seconds = {t: sum(r.seconds for r in rows if r.table == t) for t in PUBLISHED_TABLES}
    table_checks = {t: table_seconds[t] < TABLE_LIMITS[t][1] for t in PUBLISHED_TABLES}
    return TableReport(rows, table_seconds, table_checks)
