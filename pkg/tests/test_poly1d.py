import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from requnet import complexity, evaluate_batch
from requnet.poly1d import (
    DensePolynomial1D,
    binary_digits,
    compile_monomial_repu,
    compile_monomial_requ,
    compile_poly_horner,
    compile_poly_requ,
    digits_base,
    tree_depth,
)
from support import (
    exceeded,
    horner_oracle,
    monomial_repu_ceiling,
    monomial_requ_ceiling,
    poly_requ_ceiling,
    rel_error,
)

X = np.random.default_rng(7).uniform(-1, 1, 100)


def test_digits():
    assert binary_digits(11) == [1, 1, 0, 1]
    assert digits_base(11, 3) == [2, 0, 1]
    with pytest.raises(ValueError):
        digits_base(0, 2)


def test_tree_depth():
    assert [tree_depth(n) for n in (0, 1, 2, 3, 4, 7, 8)] == [0, 1, 2, 2, 3, 3, 4]


def test_dense_polynomial_strips_and_differentiates():
    p = DensePolynomial1D([1.0, 2.0, 3.0, 0.0, 0.0])
    assert p.degree == 2
    assert p.derivative().coefficients == (2.0, 6.0)
    assert DensePolynomial1D([]).coefficients == (0.0,)
    assert p(2.0) == pytest.approx(17.0)


@pytest.mark.parametrize("n,L,nodes", [(3, 3, 10), (7, 4, 15), (15, 5, 20), (31, 6, 25), (63, 7, 30), (127, 8, 35)])
def test_monomial_layers_and_nodes(n, L, nodes):
    rep = complexity(compile_monomial_requ(n))
    assert (rep.total_layers, rep.nodes) == (L, nodes)


def test_monomial_small_cases():
    assert evaluate_batch(compile_monomial_requ(0), X)[:, 0].tolist() == [1.0] * len(X)
    assert np.allclose(evaluate_batch(compile_monomial_requ(1), X)[:, 0], X, atol=1e-15)
    with pytest.raises(ValueError):
        compile_monomial_requ(-1)


@given(st.integers(1, 300))
def test_monomial_exact_and_bounded(n):
    net = compile_monomial_requ(n)
    assert rel_error(evaluate_batch(net, X)[:, 0], X**n) <= 1e-12
    assert exceeded(complexity(net), monomial_requ_ceiling(n)) == []


def test_monomial_outside_unit_interval():
    net = compile_monomial_requ(37)
    x = np.array([-1.7, 1.3, 2.0])
    # the last product multiplies x**32 by x**5; its cancellation error is
    # about eps * |x|**27 relative, 4e-10 at |x| = 1.7
    assert np.allclose(evaluate_batch(net, x)[:, 0], x**37, rtol=1e-9)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=128).filter(lambda c: c[-1] != 0))
def test_poly_tree_exact_and_bounded(c):
    n = len(c) - 1
    net = compile_poly_requ(c)
    assert rel_error(evaluate_batch(net, X)[:, 0], horner_oracle(c, X)) <= 1e-11
    rep = complexity(net)
    assert rep.hidden_layers == tree_depth(n)
    assert exceeded(rep, poly_requ_ceiling(n)) == []


@pytest.mark.parametrize("n,nodes,weights", [(3, 14, 66), (7, 31, 188), (15, 64, 429), (31, 129, 910), (63, 258, 1871), (127, 515, 3792)])
def test_poly_tree_counts_of_dense_polynomials(n, nodes, weights, rng):
    rep = complexity(compile_poly_requ(rng.standard_normal(n + 1)))
    assert (rep.nodes, rep.nonzero_weights) == (nodes, weights)


def test_poly_constant():
    net = compile_poly_requ([4.5])
    assert evaluate_batch(net, X)[:, 0].tolist() == [4.5] * len(X)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=60).filter(lambda c: c[-1] != 0))
def test_horner_exact(c):
    net = compile_poly_horner(c)
    assert rel_error(evaluate_batch(net, X)[:, 0], horner_oracle(c, X)) <= 1e-11
    assert complexity(net).hidden_layers == len(c) - 1


def test_horner_layer_count():
    rep = complexity(compile_poly_horner([1.0, 2.0, 3.0, 4.0, 5.0]))
    # one hidden layer per multiplication after the first affine step
    assert rep.hidden_layers == 4
    assert rep.passthrough_nodes > 0
    with pytest.raises(ValueError):
        compile_poly_horner([1.0])


@given(st.integers(2, 6), st.integers(1, 127))
def test_monomial_repu_exact_and_bounded(s, n):
    net = compile_monomial_repu(n, s)
    assert net.s == s
    assert rel_error(evaluate_batch(net, X)[:, 0], X**n) <= 1e-11
    assert exceeded(complexity(net), monomial_repu_ceiling(n, s)) == []


def test_monomial_repu_special_cases():
    assert complexity(compile_monomial_repu(3, 3)).nodes == 2
    assert complexity(compile_monomial_repu(2, 5)).hidden_layers == 1
    with pytest.raises(ValueError):
        compile_monomial_repu(3, 1)
    with pytest.raises(ValueError):
        compile_monomial_repu(0, 3)
