import numpy as np
import pytest
from scipy.interpolate import BarycentricInterpolator

from requnet import ContractError, complexity, evaluate_batch
from requnet.frontend import (
    BUILTIN_FUNCTIONS,
    CSV_HEADER,
    ConvergenceRecord,
    chebyshev_interpolate_1d,
    compile_function_1d,
    convergence_study,
    records_to_csv,
    verify_tables,
)
from requnet.poly1d import horner_eval

X1000 = np.random.default_rng(3).uniform(-1, 1, 1000)


def cgl_oracle(f, N, x):
    # scipy's barycentric interpolation through the same nodes
    nodes = -np.cos(np.arange(N + 1) * np.pi / N) if N > 0 else np.array([0.0])
    if N == 0:
        return np.full_like(x, f(nodes)[0])
    return BarycentricInterpolator(nodes, f(nodes))(x)


def test_interpolate_exact_on_polynomials():
    p = chebyshev_interpolate_1d(lambda x: x**2, 2)
    assert np.allclose(p.coefficients, [0.0, 0.0, 1.0], atol=1e-13)
    assert chebyshev_interpolate_1d(lambda x: 3.0 + 0 * x, 0).coefficients == (3.0,)
    with pytest.raises(ValueError):
        chebyshev_interpolate_1d(np.sin, -1)


@pytest.mark.parametrize("N", [1, 4, 8, 16, 24])
def test_interpolant_matches_barycentric_oracle(N):
    p = chebyshev_interpolate_1d(np.exp, N)
    assert np.max(np.abs(p(X1000) - cgl_oracle(np.exp, N, X1000))) <= 1e-12


def test_interpolate_sin_degree_8():
    p = chebyshev_interpolate_1d(np.sin, 8)
    assert np.max(np.abs(p(X1000) - np.sin(X1000))) <= 1e-6


@pytest.mark.parametrize("N,tol", [(8, 1e-6), (16, 1e-12)])
def test_compile_function_sin(N, tol):
    net = compile_function_1d(np.sin, N)
    assert np.max(np.abs(evaluate_batch(net, X1000)[:, 0] - np.sin(X1000))) <= tol


@pytest.mark.parametrize("N", [3, 5, 9, 20])
def test_compile_function_cubic(N):
    net = compile_function_1d(lambda x: x**3, N)
    assert np.max(np.abs(evaluate_batch(net, X1000)[:, 0] - X1000**3)) <= 1e-12


@pytest.mark.parametrize("N", [0, 2, 7, 16, 30])
def test_network_adds_no_error(N):
    f = lambda x: np.cos(3 * x) + x
    p = chebyshev_interpolate_1d(f, N)
    net = compile_function_1d(f, N)
    assert np.max(np.abs(evaluate_batch(net, X1000)[:, 0] - horner_eval(p.coefficients, X1000))) <= 1e-12


def test_compile_function_rejects_other_powers():
    with pytest.raises(ContractError):
        compile_function_1d(np.sin, 4, s=3)


def test_convergence_1d_sin():
    recs = convergence_study(BUILTIN_FUNCTIONS["sin"], [16, 4, 8], "1d")
    assert [r.N for r in recs] == [4, 8, 16]
    e = [r.max_error for r in recs]
    assert e[0] > e[1] > e[2] and e[2] / e[1] <= 1e-4 and e[2] <= 1e-12
    assert all(r.l2_error <= r.max_error for r in recs)


def test_convergence_exact_class():
    f = lambda X: horner_eval([1.0, -2.0, 0.5, 0.0, 3.0, 1.0], X[:, 0])
    (rec,) = convergence_study(f, [8], "1d")
    assert rec.max_error <= 1e-12


LEVELS = {"1d": [4, 8, 16], "tensor_2d": [4, 8, 16], "hyperbolic_2d": [7, 15, 31], "sparse_grid": [3, 4, 5, 6, 7]}


@pytest.mark.parametrize("name", ["sin", "exp"])
@pytest.mark.parametrize("mode", list(LEVELS))
def test_monotone_convergence(name, mode):
    recs = convergence_study(BUILTIN_FUNCTIONS[name], LEVELS[mode], mode, n_samples=4000)
    errs = [r.max_error for r in recs]
    assert all(a > b for a, b in zip(errs, errs[1:])), errs


def test_workers_do_not_change_results():
    f = BUILTIN_FUNCTIONS["exp"]
    a = convergence_study(f, [4, 8], "tensor_2d", n_samples=500)
    b = convergence_study(f, [4, 8], "tensor_2d", n_samples=500, workers=2)
    assert [r.max_error for r in a] == [r.max_error for r in b]


def test_csv_schema_and_determinism():
    f = BUILTIN_FUNCTIONS["sin"]
    a = records_to_csv(convergence_study(f, [4, 8], "1d", seed=5), timing=False)
    b = records_to_csv(convergence_study(f, [4, 8], "1d", seed=5), timing=False)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) == "N,max_error,l2_error,layers,nodes,weights,seconds"
    assert len(lines) == 3 and lines[1].startswith("4,")


def test_record_rejects_negative_error():
    rep = complexity(compile_function_1d(np.sin, 2))
    with pytest.raises(ValueError):
        ConvergenceRecord(2, -1.0, 0.0, rep, 0.0)


def test_unknown_mode():
    with pytest.raises(ValueError):
        convergence_study(np.sin, [4], "bogus")


def test_verify_tables_rows():
    report = verify_tables(seed=0)
    rows = {(r.table, r.key): r for r in report.rows}
    assert rows[("monomial", 63)].complexity.total_layers == 7
    assert rows[("monomial", 63)].complexity.nodes == 30
    assert rows[("tensor2d", 7)].complexity.total_layers == 7
    assert rows[("hyperbolic2d", 127)].complexity.total_layers == 15
    text = report.format()
    assert "Table 4" in text and text.strip().endswith(("PASS", "FAIL"))
    assert report.passed == all(r.passed for r in report.rows) and report.failing_rows() == [
        r for r in report.rows if not r.passed
    ]


def test_verify_tables_is_deterministic():
    a = verify_tables(seed=3)
    b = verify_tables(seed=3, workers=3)
    assert [r.max_error for r in a.rows] == [r.max_error for r in b.rows]
    assert [r.complexity for r in a.rows] == [r.complexity for r in b.rows]
