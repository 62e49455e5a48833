# tests/test_autodiff.py
import numpy as np
import pytest

from walkpool.core import autodiff as ad
from walkpool.core.errors import ShapeError
from walkpool.core.graph import build_graph, gcn_normalized_adjacency
from walkpool.core.rng import PortableRng


def random_param(seed, shape, name):
    return ad.parameter(PortableRng(seed).uniform_array(shape, -1.0, 1.0), name=name)


def test_sigmoid_value_and_gradient():
    x = ad.parameter(np.zeros(1), name="x")
    y = ad.sum_all(ad.sigmoid(x))
    y.backward()
    assert y.item() == 0.5
    assert x.grad[0] == 0.25


def test_sigmoid_is_stable_for_large_inputs():
    out = ad.sigmoid(ad.constant(np.array([-800.0, 800.0]))).values
    assert np.all(np.isfinite(out))
    assert out[0] == 0.0 and out[1] == 1.0


def test_masked_softmax_rows():
    a = ad.constant(np.array([[1.0, 2.0, 3.0], [5.0, 0.0, 0.0], [1.0, 1.0, 1.0]]))
    mask = np.array([[True, True, False], [False, True, False], [False, False, False]])
    out = ad.masked_softmax(a, mask).values
    assert out[0].sum() == pytest.approx(1.0, abs=1e-12)
    assert out[0, 2] == 0.0
    assert out[1].tolist() == [0.0, 1.0, 0.0]
    assert out[2].tolist() == [0.0, 0.0, 0.0]


def test_masked_softmax_shape_error():
    with pytest.raises(ShapeError):
        ad.masked_softmax(ad.constant(np.zeros((2, 2))), np.ones((3, 3), dtype=bool))


def test_matmul_shape_error_names_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\) vs \(2, 3\)"):
        ad.matmul(ad.constant(np.zeros((2, 3))), ad.constant(np.zeros((2, 3))))


@pytest.mark.parametrize("build", [
    lambda a, b, m: ad.sum_all(ad.relu(ad.matmul(a, b))),
    lambda a, b, m: ad.trace(ad.matmul(ad.masked_softmax(ad.matmul(a, ad.transpose(a)), m), ad.matmul(a, a))),
    lambda a, b, m: ad.mse_loss(ad.reshape(ad.sigmoid(ad.matmul(a, b)), (12,)), np.linspace(0, 1, 12)),
    lambda a, b, m: ad.sum_all(ad.gather(ad.mul(ad.matmul(a, b), ad.matmul(a, b)), [0, 1, 3], [2, 0, 1])),
    lambda a, b, m: ad.sum_all(ad.concat([ad.index_select(a, [3, 0, 0]), ad.scalar_mul(a, -2.0)], axis=0)),
])
def test_ops_match_finite_differences(build):
    a = random_param(1, (4, 4), "a")
    b = random_param(2, (4, 3), "b")
    mask = np.array([
        [0, 1, 1, 0],
        [1, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
    ], dtype=bool)
    report = ad.grad_check(lambda: build(a, b, mask), {"a": a, "b": b}, coords_per_param=16)
    assert report.passed, report


def test_shared_subexpression_gradient_is_linear():
    x = random_param(3, (3, 3), "x")
    y = ad.matmul(x, x)
    total = ad.add(ad.sum_all(y), ad.sum_all(y))
    total.backward()
    combined = x.grad.copy()

    x.zero_grad()
    ad.sum_all(ad.matmul(x, x)).backward()
    assert np.allclose(combined, 2.0 * x.grad, atol=1e-12)


def test_no_grad_records_nothing():
    x = random_param(4, (2, 2), "x")
    with ad.no_grad():
        y = ad.relu(x)
    assert not y.requires_grad
    assert ad.is_grad_enabled()


def test_gcn_layer_edgeless_identity():
    g = build_graph(3, [])
    z = ad.constant(np.array([[1.0, -2.0], [0.5, 3.0], [-1.0, -1.0]]))
    out = ad.gcn_layer(g, z, ad.constant(np.eye(2)))
    assert np.array_equal(out.values, np.maximum(z.values, 0.0))


def test_gcn_layer_k2_keeps_ones():
    out = ad.gcn_layer(build_graph(2, [(0, 1)]), ad.constant(np.ones((2, 3))), ad.constant(np.eye(3)))
    assert np.allclose(out.values, 1.0)


def test_gcn_layer_matches_dense_formula(random_graphs):
    g = random_graphs[0]
    z = random_param(5, (g.num_nodes, 4), "z")
    w = random_param(6, (4, 3), "w")
    a = g.to_dense() + np.eye(g.num_nodes)
    d = np.diag(1.0 / np.sqrt(a.sum(axis=1)))
    expected = np.maximum(d @ a @ d @ z.values @ w.values, 0.0)
    assert np.allclose(ad.gcn_layer(g, z, w).values, expected, atol=1e-12)
    assert np.allclose(gcn_normalized_adjacency(g), d @ a @ d, atol=1e-12)


def test_mlp_zero_weights_give_bias():
    w = ad.parameter(np.zeros((3, 2)), name="w")
    b = ad.parameter(np.array([0.5, -1.0]), name="b")
    out = ad.mlp_forward([(w, b)], ad.constant(np.ones((4, 3))))
    assert np.array_equal(out.values, np.tile([0.5, -1.0], (4, 1)))


def test_mlp_gradients():
    rng = PortableRng(8)
    layers = ad.init_mlp(rng, [3, 5, 2], prefix="mlp")
    x = ad.constant(rng.uniform_array((4, 3), -1, 1))
    params = ad.named_parameters(layers)
    assert sorted(params) == ["mlp.0.bias", "mlp.0.weight", "mlp.1.bias", "mlp.1.weight"]
    report = ad.grad_check(lambda: ad.sum_all(ad.mlp_forward(layers, x)), params)
    assert report.passed, report


def test_adam_zero_gradient_leaves_params():
    p = ad.parameter(np.array([1.0, -2.0]), name="p")
    ad.adam_step({"p": p}, {"p": np.zeros(2)}, ad.AdamState(), lr=0.1)
    assert p.values.tolist() == [1.0, -2.0]


def test_adam_first_step_magnitude():
    p = ad.parameter(np.array([3.0]), name="p")
    ad.adam_step({"p": p}, {"p": np.array([1.0])}, ad.AdamState(), lr=0.1)
    assert p.values[0] == pytest.approx(2.9, abs=1e-6)


def test_adam_descends_a_quadratic_bowl():
    p = ad.parameter(np.array([2.0, -3.0]), name="p")
    state = ad.AdamState()
    losses = []
    for _ in range(500):
        p.zero_grad()
        loss = ad.sum_all(ad.mul(p, p))
        loss.backward()
        losses.append(loss.item())
        ad.adam_step({"p": p}, None, state, lr=0.01)
    assert losses[-1] < 1e-2 * losses[0]
    assert all(b <= a for a, b in zip(losses[10:200], losses[11:201]))


def test_weight_decay_pulls_towards_zero():
    p = ad.parameter(np.array([1.0]), name="p")
    ad.adam_step({"p": p}, {"p": np.zeros(1)}, ad.AdamState(), lr=0.1, weight_decay=1.0)
    assert p.values[0] < 1.0


def test_intermediate_gradients_are_allocated_on_demand():
    x = random_param(5, (3, 3), "x")
    y = ad.matmul(x, x)
    assert x.grad is not None and y.grad is None
    ad.trace(y).backward()
    assert y.grad.tolist() == np.eye(3).tolist()
    assert np.allclose(x.grad, 2.0 * x.values.T, atol=1e-12)
