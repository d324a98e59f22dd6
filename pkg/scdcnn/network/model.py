"""
network/model.py — Built networks, float reference inference and SC inference.

Both paths see the same per-layer activation slope: a stage computes
tanh(gain · pool(z)) on its exact inner products z, with gain the slope its
SC activation realises for the stage's state count K. K is fixed when the
network is built (sized for ``NetworkSpec.length``) and stays fixed for every
SC run unless a run overrides the stage.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from scdcnn.blocks.activation import btanh_matrix, optimal_states, stanh_matrix, transfer_gain
from scdcnn.blocks.pooling import POOL_WINDOW, avg_pool_matrix, max_pool_matrix
from scdcnn.core.config import settings
from scdcnn.core.errors import ContractError, ShapeMismatchError
from scdcnn.core.models import ActVariant, ApcMode, FebConfig, FebIpVariant, LayerOverride, PoolVariant, ScRunConfig
from scdcnn.feature.extraction import activation_boundary, resolve_states
from scdcnn.network.spec import (
    POOL_SIZE,
    ConvPoolLayer,
    FullyConnectedLayer,
    LayerGeometry,
    LayerSpec,
    NetworkSpec,
    OutputLayer,
)
from scdcnn.stochastic.arithmetic import apc_counts, multiply_bits, mux_select
from scdcnn.stochastic.sng import StreamFactory
from scdcnn.stochastic.streams import decode_bits
from scdcnn.storage.idx_reader import Dataset, Image
from scdcnn.storage.weight_store import WeightSet

logger = logging.getLogger(__name__)

ImageLike = Union[Image, np.ndarray]
EvalMode = Union[Literal["float"], ScRunConfig]

# products per chunk in the fully connected SC path
_FC_CHUNK_BITS = 1 << 25


@dataclass(frozen=True)
class Stage:
    index: int
    layer: LayerSpec
    geometry: LayerGeometry
    weights: np.ndarray
    states: Optional[int]
    gain: float


@dataclass(frozen=True)
class Network:
    spec: NetworkSpec
    weight_set: WeightSet
    stages: tuple[Stage, ...]

    @property
    def classes(self) -> int:
        return self.stages[-1].geometry.filters


@dataclass(frozen=True)
class _StagePlan:
    ip_variant: FebIpVariant
    pool_variant: Optional[PoolVariant]
    act_variant: Optional[ActVariant]
    states: Optional[int]
    apc_mode: ApcMode
    boundary: str = "half"


def _apc_mode(setting: str, n_inputs: int) -> ApcMode:
    if setting != "auto":
        return setting  # type: ignore[return-value]
    return "approximate" if n_inputs % 16 == 0 else "exact"


def _fc_states(ip_variant: FebIpVariant, n_inputs: int, length: int) -> int:
    return optimal_states("apc_any" if ip_variant == "apc" else "mux_avg", n_inputs, length)


def build_network(spec: NetworkSpec, ws: WeightSet) -> Network:
    ws.check_against(spec)
    stages = []
    for g, layer, weights in zip(spec.geometry(), spec.layers, ws.layers):
        matrix = weights.matrix()
        matrix.setflags(write=False)
        if isinstance(layer, ConvPoolLayer):
            K = resolve_states(spec.feb_config(g.index))
            gain = transfer_gain(layer.act_variant, layer.pool_variant, K, g.n_inputs)
        elif isinstance(layer, FullyConnectedLayer):
            K = layer.states or _fc_states(layer.ip_variant, g.n_inputs, spec.length)
            gain = transfer_gain(layer.act_variant, None, K, g.n_inputs)
        else:
            K, gain = None, 1.0
        stages.append(Stage(g.index, layer, g, matrix, K, gain))
    counts = "-".join(str(c) for c in spec.neuron_counts())
    logger.info("[NETWORK] built %s with weight precisions %s", counts, ws.precisions)
    return Network(spec, ws, tuple(stages))


def _image_array(net: Network, image: ImageLike) -> np.ndarray:
    pixels = image.pixels if isinstance(image, Image) else np.asarray(image, dtype=np.float64)
    expected = net.spec.input_shape
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    if pixels.shape != expected:
        raise ShapeMismatchError(0, "input shape", expected, pixels.shape)
    return pixels


def _conv_windows(act: np.ndarray, kernel: int) -> np.ndarray:
    """(H, W, C, ...) → (oh, ow, k·k·C, ...) receptive fields in (row, col, channel) order, matching filter layout."""
    win = sliding_window_view(act, (kernel, kernel), axis=(0, 1))
    win = np.moveaxis(win, (-2, -1), (2, 3))
    oh, ow = win.shape[:2]
    return win.reshape(oh, ow, -1, *act.shape[3:])


def _pool_windows(values: np.ndarray) -> np.ndarray:
    """(oh, ow, ...) → (oh/2, ow/2, 4, ...) grouping each 2×2 window."""
    oh, ow = values.shape[:2]
    rest = values.shape[2:]
    grouped = values.reshape(oh // POOL_SIZE, POOL_SIZE, ow // POOL_SIZE, POOL_SIZE, *rest)
    grouped = np.moveaxis(grouped, 2, 1)
    return grouped.reshape(oh // POOL_SIZE, ow // POOL_SIZE, POOL_WINDOW, *rest)


# ── Float reference ────────────────────────────────────────────────────────


def forward_float(
    net: Network,
    image: ImageLike,
    *,
    layer_noise: Optional[Mapping[int, float]] = None,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Class scores in double precision; ``layer_noise`` adds uniform noise of the given amplitude to a layer's outputs."""
    act = _image_array(net, image)
    noise = dict(layer_noise or {})
    if noise and rng is None:
        rng = np.random.default_rng(0)
    for stage in net.stages:
        layer = stage.layer
        if isinstance(layer, ConvPoolLayer):
            z = _conv_windows(act, layer.kernel) @ stage.weights.T
            windows = _pool_windows(z)
            pooled = windows.mean(axis=2) if layer.pool_variant == "avg" else windows.max(axis=2)
            act = np.tanh(stage.gain * pooled)
        else:
            z = stage.weights @ act.reshape(-1)
            act = (np.tanh(stage.gain * z) if isinstance(layer, FullyConnectedLayer) else z).reshape(1, 1, -1)
        amplitude = noise.get(stage.index, 0.0)
        if amplitude:
            act = act + rng.uniform(-amplitude, amplitude, act.shape)  # type: ignore[union-attr]
            if not isinstance(layer, OutputLayer):
                act = np.clip(act, -1.0, 1.0)
    return act.reshape(-1)


# ── Stochastic inference ───────────────────────────────────────────────────


def _plan(net: Network, stage: Stage, run: ScRunConfig) -> _StagePlan:
    layer = stage.layer
    override = run.layer_overrides.get(stage.index, LayerOverride())
    n = stage.geometry.n_inputs
    ip = override.ip_variant or layer.ip_variant
    apc = _apc_mode(override.apc_mode or layer.apc_mode, n)
    changed = ip != layer.ip_variant
    if isinstance(layer, ConvPoolLayer):
        pool = run.pooling_mode or layer.pool_variant
        changed = changed or pool != layer.pool_variant
        default_act: ActVariant = "btanh" if ip == "apc" else ("stanh_fifth" if pool == "max" else "stanh")
        cfg = FebConfig(
            ip_variant=ip,
            pool_variant=pool,
            act_variant=override.act_variant or default_act,
            n_inputs=n,
            length=run.length,
            segment=net.spec.segment,
            states=override.states,
            apc_mode=apc,
        )
        if override.states:
            K = override.states
        elif changed:
            K = resolve_states(cfg.model_copy(update={"length": net.spec.length}))
        else:
            K = stage.states
        return _StagePlan(ip, pool, cfg.act_variant, K, apc, activation_boundary(cfg))
    if isinstance(layer, FullyConnectedLayer):
        act: ActVariant = override.act_variant or ("btanh" if ip == "apc" else "stanh")
        if (ip == "apc") != (act == "btanh"):
            raise ContractError(f"layer {stage.index}: {ip} inner products cannot feed {act}")
        K = override.states or (_fc_states(ip, n, net.spec.length) if changed else stage.states)
        return _StagePlan(ip, None, act, K, apc, "fifth" if act == "stanh_fifth" else "half")
    return _StagePlan(ip, None, None, None, apc)


def _sum_products(products: np.ndarray, plan: _StagePlan, factory: StreamFactory) -> np.ndarray:
    """(B, N, L) products → (B, L) MUX output bits or APC counts."""
    batch, n, length = products.shape
    if plan.ip_variant == "mux":
        return mux_select(products, factory.select_matrix(batch, n, length))
    return apc_counts(products, plan.apc_mode)


def _activate(summed: np.ndarray, plan: _StagePlan, n: int) -> np.ndarray:
    if plan.ip_variant == "mux":
        return stanh_matrix(summed, plan.states, plan.boundary)  # type: ignore[arg-type]
    return btanh_matrix(summed, n, plan.states)  # type: ignore[arg-type]


def _conv_pool_sc(
    net: Network, stage: Stage, plan: _StagePlan, bits: np.ndarray, factory: StreamFactory, length: int
) -> np.ndarray:
    layer = stage.layer
    assert isinstance(layer, ConvPoolLayer)
    g = stage.geometry
    n, filters = g.n_inputs, g.filters
    fields = _conv_windows(bits, layer.kernel)
    oh, ow = fields.shape[:2]
    fields = fields.reshape(oh * ow, n, length)
    weight_bits = factory.encode_matrix(stage.weights, "bipolar", length).reshape(filters, n, length)
    out_h, out_w = oh // POOL_SIZE, ow // POOL_SIZE
    pooled = np.empty((filters, out_h * out_w, length), dtype=np.int64)
    domain = "stochastic" if plan.ip_variant == "mux" else "binary"
    for f in range(filters):
        summed = _sum_products(multiply_bits(fields, weight_bits[f], "bipolar"), plan, factory)
        windows = _pool_windows(summed.reshape(oh, ow, length)).reshape(-1, POOL_WINDOW, length)
        batch = windows.shape[0]
        if plan.pool_variant == "avg":
            chosen = factory.select_matrix(batch, POOL_WINDOW, length) if domain == "stochastic" else None
            pooled[f] = avg_pool_matrix(windows, domain, chosen)  # type: ignore[arg-type]
        else:
            first = factory.select_matrix(batch, POOL_WINDOW, 1)[:, 0]
            pooled[f] = max_pool_matrix(windows, net.spec.segment, first)
    out = _activate(pooled.reshape(filters * out_h * out_w, length), plan, n)
    return out.reshape(filters, out_h, out_w, length).transpose(1, 2, 0, 3)


def _dense_sums(stage: Stage, plan: _StagePlan, bits: np.ndarray, factory: StreamFactory, length: int) -> np.ndarray:
    n, units = stage.geometry.n_inputs, stage.geometry.filters
    x = bits.reshape(n, length)
    chunk = max(1, _FC_CHUNK_BITS // (n * length))
    sums = []
    for start in range(0, units, chunk):
        rows = stage.weights[start : start + chunk]
        w_bits = factory.encode_matrix(rows, "bipolar", length).reshape(len(rows), n, length)
        sums.append(_sum_products(multiply_bits(x[None], w_bits, "bipolar"), plan, factory))
    return np.concatenate(sums).astype(np.int64)


def forward_sc(net: Network, image: ImageLike, run: ScRunConfig, stream_key: int = 0) -> np.ndarray:
    """Class scores decoded from the bit-exact SC pipeline; deterministic in (run.seed, stream_key)."""
    length = run.length
    pixels = _image_array(net, image)
    factory = StreamFactory([run.seed, stream_key], width=run.sng_width, mode=run.generator_mode)
    bits = factory.encode_matrix(pixels, "bipolar", length).reshape(*pixels.shape, length)
    for stage in net.stages:
        plan = _plan(net, stage, run)
        n = stage.geometry.n_inputs
        if isinstance(stage.layer, ConvPoolLayer):
            bits = _conv_pool_sc(net, stage, plan, bits, factory, length)
        elif isinstance(stage.layer, FullyConnectedLayer):
            out = _activate(_dense_sums(stage, plan, bits, factory, length), plan, n)
            bits = out.reshape(1, 1, -1, length)
        else:
            sums = _dense_sums(stage, plan, bits, factory, length)
            if plan.ip_variant == "mux":
                return n * decode_bits(sums, "bipolar")
            return 2.0 * sums.mean(axis=1) - n
    return decode_bits(bits.reshape(-1, length), "bipolar")


# ── Evaluation ─────────────────────────────────────────────────────────────


def _scores(net: Network, images: Sequence[Image], mode: EvalMode) -> list[np.ndarray]:
    if mode == "float":
        return [forward_float(net, img) for img in images]
    run = mode
    with ThreadPoolExecutor(max_workers=settings.SCDCNN_THREADS) as pool:
        return list(pool.map(lambda i: forward_sc(net, images[i], run, stream_key=i), range(len(images))))


def evaluate(net: Network, dataset: Dataset, mode: EvalMode = "float", limit: Optional[int] = None) -> float:
    """Fraction misclassified by argmax (lowest class index wins ties)."""
    images = dataset.head(limit).images
    if not images:
        raise ContractError("cannot evaluate on an empty dataset")
    if any(img.label is None for img in images):
        raise ContractError("evaluation needs labelled images")
    scores = _scores(net, images, mode)
    wrong = sum(int(np.argmax(s)) != img.label for s, img in zip(scores, images))
    rate = wrong / len(images)
    logger.info(
        "[NETWORK] %s error rate %.4f on %d images", "float" if mode == "float" else "sc", rate, len(images)
    )
    return rate


def agreement(net: Network, images: Sequence[Image], run: ScRunConfig) -> float:
    """Fraction of images whose SC argmax equals the float argmax."""
    if not images:
        raise ContractError("cannot compare on an empty image list")
    ref = _scores(net, images, "float")
    sc = _scores(net, images, run)
    return sum(int(np.argmax(a)) == int(np.argmax(b)) for a, b in zip(ref, sc)) / len(images)


__all__ = [
    "Stage",
    "Network",
    "build_network",
    "forward_float",
    "forward_sc",
    "evaluate",
    "agreement",
]
