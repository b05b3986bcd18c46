"""Shared oracles, generators and complexity ceilings for the test suite."""
from __future__ import annotations

import itertools
import math

import numpy as np

from requnet.indexsets import downward_closure
from requnet.network import ComplexityReport


def rel_error(approx, exact) -> float:
    """``max|approx - exact| / max(1, max|exact|)``."""
    approx = np.asarray(approx, dtype=float).reshape(-1)
    exact = np.asarray(exact, dtype=float).reshape(-1)
    scale = max(1.0, float(np.max(np.abs(exact), initial=0.0)))
    return float(np.max(np.abs(approx - exact), initial=0.0)) / scale


def horner_oracle(coeffs, x):
    """Plain Python Horner loop, independent of the package."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in reversed(list(coeffs)):
        out = out * x + c
    return out


def monomial_oracle(terms: dict, X) -> np.ndarray:
    """Direct ``sum a_k prod x_i**k_i`` with explicit powers (no shared code with the package)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not terms:
        return np.zeros(X.shape[0])
    K = np.array(list(terms.keys()), dtype=float)
    a = np.array(list(terms.values()), dtype=float)
    out = np.zeros(X.shape[0])
    for start in range(0, len(a), 1000):
        P = np.prod(X[:, None, :] ** K[None, start : start + 1000, :], axis=2)
        out += P @ a[start : start + 1000]
    return out


def random_downward_closed(rng: np.random.Generator, d: int, max_terms: int) -> frozenset:
    """Downward closure of a few random corners, kept below ``max_terms``."""
    while True:
        n_corners = int(rng.integers(1, 6))
        budget = max_terms ** (1.0 / d)
        top = max(1, int(rng.integers(1, max(2, int(2 * budget)))))
        corners = [tuple(int(v) for v in rng.integers(0, top + 1, size=d)) for _ in range(n_corners)]
        S = downward_closure(corners)
        if len(S) <= max_terms:
            return S


def floor_log(n: int, base: int) -> int:
    m = 0
    while base ** (m + 1) <= n:
        m += 1
    return m


# ------------------------------------------------------ theorem ceilings ----


def monomial_requ_ceiling(n: int) -> dict:
    m = floor_log(n, 2)
    return {"total_layers": m + 2, "nodes": 5 * m + 5, "weights": 25 * m + 14}


def poly_requ_ceiling(n: int) -> dict:
    return {"hidden_layers": floor_log(n, 2) + 1, "nodes": 9 * n, "weights": 61 * n}


def monomial_repu_ceiling(n: int, s: int) -> dict:
    if n == s:
        return {"hidden_layers": 1, "nodes": 2}
    if n < s:
        return {"hidden_layers": 1, "nodes": 2 * s}
    m = floor_log(n, s)
    # the weight count is only stated as O(25 s^2 log_s n); m + 2 covers every layer
    return {"hidden_layers": m + 2, "nodes": (6 * s + 2) * (m + 2), "weights": 25 * s * s * (m + 2)}


def total_degree_ceiling(n: int, d: int) -> dict:
    out = {"hidden_layers": d * floor_log(n, 2) + d}
    if d == 2 and n >= 4:
        m = floor_log(n, 2)
        out["nodes"] = 9 * n * (n + 1) // 2 + 17 * n + 8 * m + 16
        out["weights"] = 61 * n * (n + 1) // 2 + 89 * n + 32 * m + 64
    return out


def tensor_ceiling(N: int, d: int) -> dict:
    return {"hidden_layers": d * floor_log(N, 2) + d}


def downward_closed_ceiling(max_degrees) -> dict:
    return {"hidden_layers": sum(floor_log(N, 2) + 1 for N in max_degrees if N >= 1)}


def exceeded(report: ComplexityReport, ceiling: dict) -> list[str]:
    """Names of the ceilings that ``report`` violates."""
    got = {
        "hidden_layers": report.hidden_layers,
        "total_layers": report.total_layers,
        "nodes": report.nodes,
        "weights": report.nonzero_weights,
    }
    return [f"{k}={got[k]}>{v}" for k, v in ceiling.items() if got[k] > v]


def box(N: int, d: int):
    return list(itertools.product(range(N + 1), repeat=d))


def binom(n: int, k: int) -> int:
    return math.comb(n, k)
