import math

import numpy as np
import pytest
from pydantic import ValidationError

from scdcnn.core.errors import ContractError, FormatError, ShapeMismatchError
from scdcnn.core.models import LayerOverride, ScRunConfig
from scdcnn.network.model import agreement, build_network, evaluate, forward_float, forward_sc
from scdcnn.network.spec import (
    ConvPoolLayer,
    FullyConnectedLayer,
    NetworkSpec,
    OutputLayer,
    format_network_spec,
    lenet5_spec,
    parse_network_spec,
)
from scdcnn.storage.idx_reader import Dataset, Image
from scdcnn.storage.weight_store import random_weight_set

TOY_TEXT = """
# one fully connected layer, four inputs
input = 2x2x1
length = 1024
layer0.kind = fc
layer0.outputs = 3
layer0.ip = apc
layer0.states = 8
"""


@pytest.fixture
def toy():
    spec = parse_network_spec(TOY_TEXT)
    return build_network(spec, random_weight_set(spec, [64], seed=3))


@pytest.fixture
def small_conv():
    spec = NetworkSpec(
        input_shape=(6, 6, 2),
        length=256,
        layers=(ConvPoolLayer(filters=2, kernel=3), OutputLayer(classes=3)),
    )
    return build_network(spec, random_weight_set(spec, [16, 16], seed=8))


def test_lenet5_geometry() -> None:
    spec = lenet5_spec()
    assert spec.neuron_counts() == [784, 11520, 2880, 3200, 800, 500, 10]
    assert spec.stages() == [[0], [1], [2, 3]]
    assert [g.weight_shape for g in spec.geometry()] == [(5, 5, 1), (5, 5, 20), (1, 1, 800), (1, 1, 500)]


def test_lenet5_stage_variants() -> None:
    spec = lenet5_spec("avg", ("mux", "apc", "apc"), length=512)
    assert spec.layers[0].ip_variant == "mux"
    assert spec.feb_config(0).label == "MUX-Avg-Stanh"
    assert spec.feb_config(1).length == 512


def test_text_form_round_trip() -> None:
    spec = lenet5_spec("max", ("apc", "mux", "apc"))
    assert parse_network_spec(format_network_spec(spec)) == spec


@pytest.mark.parametrize(
    "text",
    [
        "colour = blue",
        "layer0.kind = pool",
        "layer0.kind = fc\nlayer0.outputs = 2\nlayer0.pool = max",
        "layer1.kind = output\nlayer1.classes = 2",
        "input = 9x9x1\nlayer0.kind = conv_pool\nlayer0.filters = 2",
        "layer0.kind = output\nlayer0.classes = 2\nlayer1.kind = fc\nlayer1.outputs = 2",
        "just text",
    ],
)
def test_text_form_errors(text: str) -> None:
    with pytest.raises(FormatError):
        parse_network_spec(text)


def test_fc_with_unit_gain_is_tanh(toy) -> None:
    stage = toy.stages[0]
    assert stage.states == 8 and stage.gain == pytest.approx(1.0)
    x = np.array([[0.5, -0.25], [0.75, 0.1]])
    expected = np.tanh(stage.weights @ x.reshape(-1))
    assert forward_float(toy, x) == pytest.approx(expected)


def test_conv_pool_matches_a_direct_loop(small_conv) -> None:
    x = np.random.default_rng(1).uniform(-1.0, 1.0, (6, 6, 2))
    conv, out = small_conv.stages
    z = np.empty((4, 4, 2))
    for i in range(4):
        for j in range(4):
            field = x[i : i + 3, j : j + 3, :].reshape(-1)
            z[i, j] = conv.weights @ field
    pooled = z.reshape(2, 2, 2, 2, 2).max(axis=(1, 3))
    act = np.tanh(conv.gain * pooled)
    assert forward_float(small_conv, x) == pytest.approx(out.weights @ act.reshape(-1))


def test_weights_must_match_the_spec(toy) -> None:
    other = NetworkSpec(input_shape=(2, 2, 1), layers=(FullyConnectedLayer(outputs=5),))
    with pytest.raises(ShapeMismatchError):
        build_network(other, toy.weight_set)


def test_input_shape_is_checked(toy) -> None:
    with pytest.raises(ShapeMismatchError):
        forward_float(toy, np.zeros((3, 3)))


def test_sc_inference_is_seeded(small_conv) -> None:
    x = np.random.default_rng(2).uniform(-1.0, 1.0, (6, 6, 2))
    run = ScRunConfig(length=256, seed=5)
    first = forward_sc(small_conv, x, run)
    assert first.shape == (3,)
    assert np.array_equal(first, forward_sc(small_conv, x, run))
    assert not np.array_equal(first, forward_sc(small_conv, x, ScRunConfig(length=256, seed=6)))


def test_sc_overrides_and_pooling_mode(small_conv) -> None:
    x = np.random.default_rng(3).uniform(-1.0, 1.0, (6, 6, 2))
    run = ScRunConfig(length=256, pooling_mode="avg", layer_overrides={0: LayerOverride(ip_variant="mux")})
    scores = forward_sc(small_conv, x, run)
    assert np.all(np.isfinite(scores))
    bad = ScRunConfig(length=256, layer_overrides={0: LayerOverride(ip_variant="mux", act_variant="btanh")})
    with pytest.raises(ValidationError):
        forward_sc(small_conv, x, bad)


def test_sc_error_shrinks_with_length(toy) -> None:
    rng = np.random.default_rng(4)
    images = [rng.uniform(-1.0, 1.0, (2, 2)) for _ in range(20)]

    def error(length: int) -> float:
        run = ScRunConfig(length=length, seed=1)
        return float(np.mean([np.abs(forward_sc(toy, x, run, i) - forward_float(toy, x)).mean() for i, x in enumerate(images)]))

    assert error(4096) < error(256)


def test_evaluate_and_agreement(toy) -> None:
    rng = np.random.default_rng(5)
    images = [Image(rng.uniform(-1.0, 1.0, (2, 2)), label=0) for _ in range(6)]
    rate = evaluate(toy, Dataset(tuple(images)))
    assert 0.0 <= rate <= 1.0
    assert 0.0 <= agreement(toy, images, ScRunConfig(length=512)) <= 1.0
    with pytest.raises(ContractError):
        evaluate(toy, Dataset(tuple(Image(img.pixels) for img in images)))
    with pytest.raises(ContractError):
        evaluate(toy, Dataset(()))


def test_layer_noise_perturbs_outputs(toy) -> None:
    x = np.zeros((2, 2))
    clean = forward_float(toy, x)
    noisy = forward_float(toy, x, layer_noise={0: 0.1}, rng=np.random.default_rng(0))
    assert not np.array_equal(clean, noisy)
    assert np.all(np.abs(noisy - clean) <= 0.1)
    assert math.isclose(float(np.abs(clean).max()), 0.0)
