import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from requnet import ContractError, complexity, evaluate_batch
from requnet.indexsets import full_box_indices, hyperbolic_cross_indices, total_degree_indices
from requnet.polymd import (
    SparsePolynomialMD,
    compile_downward_closed,
    compile_tensor_product,
    compile_total_degree,
    monomial_sum,
)
from support import (
    downward_closed_ceiling,
    exceeded,
    monomial_oracle,
    random_downward_closed,
    rel_error,
    tensor_ceiling,
    total_degree_ceiling,
)


def check(net, terms, d, rng):
    X = rng.uniform(-1, 1, (100, d))
    return rel_error(evaluate_batch(net, X)[:, 0], monomial_oracle(terms, X))


@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_downward_closed_exact_and_bounded(seed, d):
    rng = np.random.default_rng(seed)
    S = random_downward_closed(rng, d, 400)
    terms = {k: rng.standard_normal() for k in S}
    p = SparsePolynomialMD(d, terms, S)
    net = compile_downward_closed(p)
    assert check(net, terms, d, rng) <= 1e-11
    assert exceeded(complexity(net), downward_closed_ceiling(p.support.max_degrees())) == []


@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(2, 3))
def test_total_degree_exact_and_bounded(seed, n, d):
    rng = np.random.default_rng(seed)
    S = total_degree_indices(n, d)
    terms = {k: rng.standard_normal() for k in S}
    net = compile_total_degree(SparsePolynomialMD(d, terms, S), n)
    assert check(net, terms, d, rng) <= 1e-11
    assert exceeded(complexity(net), total_degree_ceiling(n, d)) == []


@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(2, 3))
def test_tensor_exact_and_bounded(seed, N, d):
    rng = np.random.default_rng(seed)
    S = full_box_indices(N, d)
    terms = {k: rng.standard_normal() for k in S}
    net = compile_tensor_product(SparsePolynomialMD(d, terms, S), N)
    assert check(net, terms, d, rng) <= 1e-11
    rep = complexity(net)
    assert rep.hidden_layers == tensor_ceiling(N, d)["hidden_layers"]


def test_sparse_terms_inside_tensor_box(rng):
    terms = {(3, 0): 1.0, (0, 5): -2.0, (2, 2): 0.5}
    net = compile_tensor_product(SparsePolynomialMD(2, terms), 5)
    assert check(net, terms, 2, rng) <= 1e-12


@pytest.mark.parametrize(
    "N,L,nodes,weights",
    [(7, 7, 217, 1254), (15, 9, 554, 3277), (31, 11, 1351, 8022), (63, 13, 3196, 19039), (127, 15, 7393, 44052)],
)
def test_hyperbolic_cross_counts(N, L, nodes, weights, rng):
    S = hyperbolic_cross_indices(N, 2)
    p = SparsePolynomialMD(2, {k: rng.standard_normal() for k in S}, S)
    rep = complexity(compile_downward_closed(p))
    assert (rep.total_layers, rep.nodes, rep.nonzero_weights) == (L, nodes, weights)


def test_non_downward_closed_rejected():
    p = SparsePolynomialMD(2, {(0, 0): 1.0, (2, 0): 1.0})
    with pytest.raises(ContractError):
        compile_downward_closed(p)


def test_contract_errors():
    with pytest.raises(ContractError):
        compile_total_degree(SparsePolynomialMD(2, {(3, 3): 1.0}), 4)
    with pytest.raises(ContractError):
        compile_tensor_product(SparsePolynomialMD(2, {(5, 0): 1.0}), 3)
    with pytest.raises(ValueError):
        SparsePolynomialMD(2, {(1, 2, 3): 1.0})
    with pytest.raises(ValueError):
        SparsePolynomialMD(2, {(2, 0): 1.0}, support=[(0, 0)])


def test_polynomial_object(rng):
    p = SparsePolynomialMD(3, {(1, 0, 2): 2.0, (0, 0, 0): -1.0})
    X = rng.uniform(-2, 2, (10, 3))
    assert np.allclose(p(X), 2.0 * X[:, 0] * X[:, 2] ** 2 - 1.0)
    assert np.allclose(monomial_sum(p.terms, X), monomial_oracle(p.terms, X))
    assert p.coefficient((1, 0, 2)) == 2.0 and p.coefficient((5, 5, 5)) == 0.0


def test_constant_polynomials(rng):
    p = SparsePolynomialMD(2, {(0, 0): 3.5})
    for net in (compile_downward_closed(p), compile_tensor_product(p), compile_total_degree(p)):
        assert np.all(evaluate_batch(net, rng.uniform(-1, 1, (5, 2)))[:, 0] == 3.5)


def test_three_dimensional_hyperbolic(rng):
    S = hyperbolic_cross_indices(12, 3)
    terms = {k: rng.standard_normal() for k in S}
    net = compile_downward_closed(SparsePolynomialMD(3, terms, S))
    assert check(net, terms, 3, rng) <= 1e-12
