import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from requnet import (
    Activation,
    LayeredNetwork,
    ShapeError,
    StructureError,
    activate,
    complexity,
    compose,
    evaluate,
    evaluate_batch,
    identity_passthrough,
    parallel,
)
from requnet.gadgets import identity_gadget, product_gadget, square_gadget


def square_net():
    # x**2 = sigma(x) + sigma(-x)
    return LayeredNetwork([(np.array([[1.0], [-1.0]]), [0.0, 0.0]), (np.array([[1.0, 1.0]]), [0.0])], 2)


def test_activation_powers():
    x = np.array([-2.0, -0.5, 0.0, 1.5])
    assert np.array_equal(activate(1, x), [0.0, 0.0, 0.0, 1.5])
    assert np.array_equal(activate(2, x), [0.0, 0.0, 0.0, 2.25])
    assert np.array_equal(activate(3, x), [0.0, 0.0, 0.0, 3.375])
    assert Activation(3)(np.array([2.0]))[0] == 8.0


def test_activation_rejects_nonpositive_power():
    with pytest.raises(ValueError):
        Activation(0)


def test_hand_built_square():
    net = square_net()
    assert evaluate(net, -3.0)[0] == 9.0
    rep = complexity(net)
    assert (rep.hidden_layers, rep.total_layers, rep.nodes, rep.nonzero_weights) == (1, 2, 2, 4)


def test_shape_error_names_layer():
    with pytest.raises(ShapeError, match="layer 2"):
        LayeredNetwork([(np.ones((2, 1)), np.zeros(2)), (np.ones((1, 3)), np.zeros(1))])
    with pytest.raises(ShapeError, match="bias"):
        LayeredNetwork([(np.ones((2, 1)), np.zeros(3))])


def test_empty_network_rejected():
    with pytest.raises(StructureError):
        LayeredNetwork([])


def test_explicit_zeros_not_counted():
    A1 = np.array([[1.0, 0.0], [0.0, 0.0], [2.0, -1.0]])
    net = LayeredNetwork([(A1, [0.0, 1.0, 0.0]), (np.array([[0.0, 1.0, 1.0]]), [0.0])])
    # layer 1: 1 + 0 + 2 entries and one bias; layer 2: two entries
    assert complexity(net).nonzero_weights == 6


def test_layers_are_read_only():
    net = square_net()
    with pytest.raises(ValueError):
        net.layers[0][1][0] = 3.0


def test_evaluate_rejects_wrong_length():
    with pytest.raises(ShapeError):
        evaluate(product_gadget(), [1.0])
    with pytest.raises(ShapeError):
        evaluate_batch(product_gadget(), np.ones((3, 3)))


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40), st.integers(1, 4))
def test_batch_matches_pointwise_and_workers(xs, workers):
    net = square_gadget()
    X = np.array(xs)
    single = np.array([evaluate(net, x)[0] for x in xs])
    assert np.array_equal(evaluate_batch(net, X)[:, 0], single)
    assert np.array_equal(evaluate_batch(net, X, workers=workers)[:, 0], single)


def test_empty_batch():
    assert evaluate_batch(square_gadget(), np.zeros((0, 1))).shape == (0, 1)


@given(st.floats(-10, 10))
def test_compose_square_twice_is_fourth_power(x):
    net = compose(square_gadget(), square_gadget())
    assert complexity(net).hidden_layers == 2
    assert np.isclose(evaluate(net, x)[0], x**4, rtol=1e-12, atol=1e-12)


def test_compose_checks_dimensions_and_power():
    with pytest.raises(ShapeError):
        compose(square_gadget(), product_gadget())
    with pytest.raises(StructureError):
        compose(square_gadget(), identity_gadget(3))


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_parallel_disjoint_and_wired(x, y):
    both = parallel([square_gadget(), identity_gadget()])
    out = evaluate(both, [x, y])
    assert np.allclose(out, [x * x, y], rtol=1e-12, atol=1e-12)
    shared = parallel([square_gadget(), identity_gadget()], wiring=[[0], [0]])
    assert shared.input_dim == 1
    assert np.allclose(evaluate(shared, x), [x * x, x], rtol=1e-12, atol=1e-12)


def test_parallel_depth_mismatch():
    with pytest.raises(StructureError, match="identity_passthrough"):
        parallel([square_gadget(), compose(square_gadget(), square_gadget())])


@pytest.mark.parametrize("s", [2, 3, 4])
@pytest.mark.parametrize("depth", [0, 1, 3])
def test_identity_passthrough(s, depth, rng):
    net = identity_passthrough(s, 3, depth)
    X = rng.uniform(-2, 2, (20, 3))
    assert np.allclose(evaluate_batch(net, X), X, rtol=1e-11, atol=1e-11)
    rep = complexity(net)
    assert rep.hidden_layers == depth
    assert rep.passthrough_nodes == rep.nodes
    assert rep.nodes_without_passthrough == 0


def test_passthrough_tags_validated():
    with pytest.raises(StructureError):
        LayeredNetwork([(np.ones((1, 1)), [0.0]), (np.ones((1, 1)), [0.0])], 2, passthrough=[{0}, {0}])


def test_equals_is_structural():
    assert square_net().equals(square_gadget())
    assert not square_net().equals(product_gadget())
    sparse = LayeredNetwork([(sp.csr_matrix([[1.0], [-1.0]]), [0.0, 0.0]), (sp.csr_matrix([[1.0, 1.0]]), [0.0])])
    assert sparse.equals(square_net())


def test_widths_and_dims():
    net = product_gadget()
    assert net.widths == [2, 4, 1]
    assert (net.input_dim, net.output_dim, net.s) == (2, 1, 2)
    assert callable(net) and net([2.0, 3.0])[0] == pytest.approx(6.0)
