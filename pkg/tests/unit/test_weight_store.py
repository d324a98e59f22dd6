import numpy as np
import pytest

from scdcnn.core.errors import ScRangeError, ShapeMismatchError
from scdcnn.network.spec import FullyConnectedLayer, NetworkSpec, OutputLayer
from scdcnn.storage.weight_store import (
    FilterBlock,
    LayerWeights,
    WeightSet,
    apply_layer_precisions,
    dequantize,
    dequantize_array,
    quantize,
    quantize_array,
    random_weight_set,
)


@pytest.fixture
def small_spec() -> NetworkSpec:
    return NetworkSpec(input_shape=(2, 2, 1), layers=(FullyConnectedLayer(outputs=3), OutputLayer(classes=2)))


def test_quantize_boundaries() -> None:
    assert quantize(-1.0, 4).code == 0
    assert quantize(0.0, 4).code == 8
    assert quantize(1.0, 4).code == 15  # +1 clamps to the top code
    assert dequantize(quantize(0.0, 4)) == 0.0


def test_quantize_rejects_bad_input() -> None:
    with pytest.raises(ScRangeError):
        quantize(1.5, 4)
    with pytest.raises(ScRangeError):
        quantize(0.5, 0)
    with pytest.raises(ScRangeError):
        quantize_array(np.array([0.0, -1.2]), 8)


@pytest.mark.parametrize("w", range(2, 13))
def test_quantization_error_bound(w: int) -> None:
    x = np.random.default_rng(w).uniform(-1.0, 1.0, 100_000)
    x[:2] = (-1.0, 1.0)
    err = np.abs(dequantize_array(quantize_array(x, w), w) - x)
    assert err.max() <= 2.0 ** (1 - w)


def test_array_and_scalar_quantizers_agree() -> None:
    x = np.linspace(-1.0, 1.0, 37)
    assert quantize_array(x, 5).tolist() == [quantize(float(v), 5).code for v in x]


def test_precision_64_codes_fit() -> None:
    codes = quantize_array(np.array([-1.0, 0.0, 1.0]), 64)
    assert codes.dtype == np.uint64
    assert int(codes[2]) == (1 << 64) - 1


def test_filter_block_validation_and_equality() -> None:
    block = FilterBlock.from_values(0, (1, 1, 3), np.array([0.1, -0.2, 0.3]), 6)
    assert block == FilterBlock.from_codes(0, (1, 1, 3), block.codes, 6)
    assert len(block.quantized()) == 3
    with pytest.raises(ScRangeError):
        FilterBlock.from_codes(0, (1, 1, 2), np.array([1, 2, 3]), 6)
    with pytest.raises(ScRangeError):
        FilterBlock.from_codes(0, (1, 1, 1), np.array([64]), 6)


def test_layer_requantization_keeps_the_real_values() -> None:
    layer = LayerWeights(7, (FilterBlock.from_values(0, (1, 1, 4), np.array([0.11, -0.37, 0.52, 0.9]), 7),))
    assert layer.requantized(7) is layer
    coarse = layer.requantized(4)
    back = coarse.requantized(7)
    assert coarse.precision == 4 and back.precision == 7
    assert np.array_equal(coarse.filters[0].values, layer.filters[0].values)
    assert np.array_equal(back.filters[0].codes, layer.filters[0].codes)
    assert not np.allclose(coarse.matrix(), layer.matrix())


def test_quantize_is_monotonic() -> None:
    x = np.sort(np.random.default_rng(2).uniform(-1.0, 1.0, 5000))
    for w in (1, 3, 8, 16):
        codes = quantize_array(x, w).astype(np.float64)
        assert np.all(np.diff(codes) >= 0)


def test_layer_needs_uniform_blocks() -> None:
    a = FilterBlock.from_values(0, (1, 1, 2), np.zeros(2), 4)
    b = FilterBlock.from_values(1, (1, 1, 2), np.zeros(2), 5)
    with pytest.raises(ScRangeError):
        LayerWeights(4, (a, b))
    with pytest.raises(ScRangeError):
        LayerWeights(4, ())


def test_random_weight_set_matches_spec(small_spec: NetworkSpec) -> None:
    ws = random_weight_set(small_spec, [8, 6], seed=1)
    ws.check_against(small_spec)
    assert ws.precisions == [8, 6]
    assert ws.layers[0].matrix().shape == (3, 4)
    assert ws == random_weight_set(small_spec, [8, 6], seed=1)


def test_check_against_reports_the_mismatch(small_spec: NetworkSpec) -> None:
    ws = random_weight_set(small_spec, [8, 8])
    other = NetworkSpec(input_shape=(2, 2, 1), layers=(FullyConnectedLayer(outputs=5), OutputLayer(classes=2)))
    with pytest.raises(ShapeMismatchError) as info:
        ws.check_against(other)
    assert info.value.layer == 0
    with pytest.raises(ShapeMismatchError):
        WeightSet(ws.layers[:1]).check_against(small_spec)


def test_apply_layer_precisions(small_spec: NetworkSpec) -> None:
    ws = random_weight_set(small_spec, [12, 12])
    assert apply_layer_precisions(ws, [3, 12]).precisions == [3, 12]
    with pytest.raises(ScRangeError):
        apply_layer_precisions(ws, [3])
