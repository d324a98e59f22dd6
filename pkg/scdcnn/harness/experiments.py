"""
harness/experiments.py — The experiment registry.

Each experiment turns a run context into a plan: its grid, one deferred
computation per grid cell and the metadata the report carries. Cells are
independent: every cell derives its randomness from (seed, cell parameters,
trial) only, so a cell's statistic does not depend on which other cells run.

    table1   OR inner product, both encodings, best prescale factor per cell
    table2   MUX inner product, absolute error after scale-back
    table3   approximate vs exact parallel counter, relative error in %
    table4   hardware max pooling vs the true maximum
    table5   Stanh relative inaccuracy over the state count K
    fig9     FEB inaccuracy over block kind × N × L
    fig10    weight precision sweep per stage and for all stages
    fig11    noise injected into one stage at a time
    table6   the twelve layer-wise LeNet-5 configurations (external data)
"""
from __future__ import annotations

import json
import logging
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from scdcnn.blocks.activation import stanh_matrix
from scdcnn.blocks.inner_product import OR_PRESCALE_GRID, inner_product, mux_estimate, or_estimate
from scdcnn.blocks.pooling import max_pool_hw
from scdcnn.core.config import settings
from scdcnn.core.errors import ExperimentConfigError, ExternalDataRequiredError
from scdcnn.core.models import CellValue, Encoding, ExperimentConfig, FebConfig, ScRunConfig
from scdcnn.feature.extraction import feb_inaccuracy
from scdcnn.network.model import build_network, evaluate, forward_float
from scdcnn.network.spec import (
    ConvPoolLayer,
    FullyConnectedLayer,
    NetworkSpec,
    OutputLayer,
    lenet5_spec,
)
from scdcnn.stochastic.sng import StreamFactory
from scdcnn.stochastic.streams import decode_bits, decode_stream
from scdcnn.storage.idx_reader import Image, load_mnist
from scdcnn.storage.weight_file import load_weights
from scdcnn.storage.weight_store import WeightSet, apply_layer_precisions, random_weight_set

logger = logging.getLogger(__name__)

ExternalData = Literal["none", "optional", "required"]

AVERAGING = "per-trial absolute error"
STANH_GRID_POINTS = 41
NOISE_AMPLITUDE = 0.1
FULL_PRECISION = 64


@dataclass(frozen=True)
class CellResult:
    mean: float
    std: float
    trials: int
    extras: dict[str, CellValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Cell:
    params: dict[str, CellValue]
    compute: Callable[[], CellResult]


@dataclass
class ExperimentPlan:
    grid_keys: list[str]
    grid: dict[str, list[CellValue]]
    cells: list[Cell]
    meta: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class RunContext:
    cfg: ExperimentConfig
    trials: int

    @property
    def seed(self) -> int:
        return self.cfg.seed

    @property
    def segment(self) -> int:
        return self.cfg.segment or settings.SCDCNN_SEGMENT_LENGTH

    def lengths(self, default: Sequence[int]) -> list[int]:
        return list(self.cfg.lengths or default)

    def inputs(self, default: Sequence[int]) -> list[int]:
        return list(self.cfg.inputs or default)

    def precisions(self, default: Sequence[int]) -> list[int]:
        return list(self.cfg.precisions or default)

    def cell_key(self, params: dict[str, CellValue]) -> int:
        return zlib.crc32(json.dumps(params, sort_keys=True).encode("utf-8"))

    def cell_seed(self, params: dict[str, CellValue]) -> int:
        """One non-negative integer mixing the run seed with the cell's identity."""
        return (self.seed << 32) | self.cell_key(params)

    def rng(self, key: int, trial: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, key, trial])

    def factory(self, key: int, trial: int) -> StreamFactory:
        return StreamFactory([self.seed, key, trial, 1])


@dataclass(frozen=True)
class Experiment:
    id: str
    title: str
    metric: str
    defaults: dict[str, list[CellValue]]
    plan: Callable[[RunContext], ExperimentPlan]
    overrides: frozenset[str] = frozenset()
    external: ExternalData = "none"


def _stats(values: np.ndarray, scale: float = 1.0) -> tuple[float, float]:
    return float(values.mean() * scale), float(values.std() * scale)


def _cell(params: dict[str, CellValue], compute: Callable[[], CellResult]) -> Cell:
    return Cell(params, compute)


# ── Inner products ─────────────────────────────────────────────────────────


def _or_cell(ctx: RunContext, params: dict[str, CellValue]) -> CellResult:
    encoding: Encoding = params["encoding"]  # type: ignore[assignment]
    n, length = int(params["n"]), int(params["length"])
    key = ctx.cell_key(params)
    low = 0.0 if encoding == "unipolar" else -1.0
    errors = np.empty((len(OR_PRESCALE_GRID), ctx.trials))
    for t in range(ctx.trials):
        rng = ctx.rng(key, t)
        x, w = rng.uniform(low, 1.0, n), rng.uniform(low, 1.0, n)
        exact = float(x @ w)
        factory = ctx.factory(key, t)
        ws = factory.encode_many(w, encoding, length)
        for i, factor in enumerate(OR_PRESCALE_GRID):
            xs = factory.encode_many(x / factor, encoding, length)
            out = inner_product(xs, ws, "or")
            errors[i, t] = abs(or_estimate(out, factor) - exact)  # type: ignore[arg-type]
    best = int(np.argmin(errors.mean(axis=1)))
    mean, std = _stats(errors[best])
    return CellResult(mean, std, ctx.trials, {"prescale": OR_PRESCALE_GRID[best]})


def _plan_table1(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "encoding": ["unipolar", "bipolar"],
        "n": ctx.inputs([16, 32, 64]),
        "length": ctx.lengths([1024]),
    }
    cells = [_cell(p, lambda p=p: _or_cell(ctx, p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells, {"prescale_grid": list(OR_PRESCALE_GRID)})


def _mux_cell(ctx: RunContext, params: dict[str, CellValue]) -> CellResult:
    n, length = int(params["n"]), int(params["length"])
    key = ctx.cell_key(params)
    errors = np.empty(ctx.trials)
    for t in range(ctx.trials):
        rng = ctx.rng(key, t)
        x, w = rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n)
        factory = ctx.factory(key, t)
        xs = factory.encode_many(x, "bipolar", length)
        ws = factory.encode_many(w, "bipolar", length)
        out = inner_product(xs, ws, "mux", select=factory.generator(length))
        errors[t] = abs(mux_estimate(out, n) - float(x @ w))  # type: ignore[arg-type]
    return CellResult(*_stats(errors), ctx.trials)


def _plan_table2(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "n": ctx.inputs([16, 32, 64]),
        "length": ctx.lengths([512, 1024, 2048, 4096]),
    }
    cells = [_cell(p, lambda p=p: _mux_cell(ctx, p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells)


def _apc_cell(ctx: RunContext, params: dict[str, CellValue]) -> CellResult:
    n, length = int(params["n"]), int(params["length"])
    key = ctx.cell_key(params)
    errors = np.empty(ctx.trials)
    for t in range(ctx.trials):
        rng = ctx.rng(key, t)
        factory = ctx.factory(key, t)
        xs = factory.encode_many(rng.uniform(-1.0, 1.0, n), "bipolar", length)
        ws = factory.encode_many(rng.uniform(-1.0, 1.0, n), "bipolar", length)
        exact = inner_product(xs, ws, "apc", apc_mode="exact")
        approx = inner_product(xs, ws, "apc", apc_mode="approximate")
        total = int(exact.counts.sum(dtype=np.int64))  # type: ignore[union-attr]
        drift = int(approx.counts.sum(dtype=np.int64)) - total  # type: ignore[union-attr]
        errors[t] = abs(drift) / max(total, 1)
    return CellResult(*_stats(errors, 100.0), ctx.trials)


def _plan_table3(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "n": ctx.inputs([16, 32, 64]),
        "length": ctx.lengths([128, 256, 384, 512]),
    }
    bad = [n for n in grid["n"] if int(n) % 16]
    if bad:
        raise ExperimentConfigError(f"table3 needs N in multiples of 16, got {bad}")
    cells = [_cell(p, lambda p=p: _apc_cell(ctx, p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells)


# ── Pooling and activation ─────────────────────────────────────────────────


def _max_pool_cell(ctx: RunContext, params: dict[str, CellValue]) -> CellResult:
    m, length = int(params["inputs"]), int(params["length"])
    key = ctx.cell_key(params)
    deviation = np.empty(ctx.trials)
    for t in range(ctx.trials):
        rng = ctx.rng(key, t)
        factory = ctx.factory(key, t)
        streams = factory.encode_many(rng.uniform(-1.0, 1.0, m), "bipolar", length)
        hw = decode_stream(max_pool_hw(streams, ctx.segment, "stochastic", factory.generator()))  # type: ignore[arg-type]
        sw = max(decode_stream(s) for s in streams)
        deviation[t] = abs(hw - sw)
    return CellResult(*_stats(deviation), ctx.trials)


def _plan_table4(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "inputs": ctx.inputs([4, 9, 16]),
        "length": ctx.lengths([128, 256, 384, 512]),
    }
    bad = [L for L in grid["length"] if int(L) % ctx.segment]
    if bad:
        raise ExperimentConfigError(f"lengths {bad} are not multiples of the segment length {ctx.segment}")
    cells = [_cell(p, lambda p=p: _max_pool_cell(ctx, p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells, {"segment": ctx.segment})


def _stanh_cell(ctx: RunContext, params: dict[str, CellValue]) -> CellResult:
    K, length = int(params["states"]), int(params["length"])
    key = ctx.cell_key(params)
    grid = np.linspace(-1.0, 1.0, STANH_GRID_POINTS)
    u = grid[np.arange(ctx.trials) % STANH_GRID_POINTS]
    factory = ctx.factory(key, 0)
    bits = factory.encode_matrix(2.0 * u / K, "bipolar", length)
    y = decode_bits(stanh_matrix(bits, K), "bipolar")
    target = np.tanh(u)
    scale = 100.0 / float(np.abs(target).mean())
    return CellResult(*_stats(np.abs(y - target), scale), ctx.trials)


def _plan_table5(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "states": ctx.inputs(list(range(8, 21, 2))),
        "length": ctx.lengths([8192]),
    }
    bad = [K for K in grid["states"] if int(K) < 2 or int(K) % 2]
    if bad:
        raise ExperimentConfigError(f"state counts must be even and >= 2, got {bad}")
    cells = [_cell(p, lambda p=p: _stanh_cell(ctx, p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells, {"input_grid": f"u = K/2 * x, {STANH_GRID_POINTS} points over [-1, 1]"})


# ── Feature-extraction blocks ──────────────────────────────────────────────

FEB_BLOCKS: dict[str, tuple[str, str, str]] = {
    "APC-Avg-Btanh": ("apc", "avg", "btanh"),
    "APC-Max-Btanh": ("apc", "max", "btanh"),
    "MUX-Avg-Stanh": ("mux", "avg", "stanh"),
    "MUX-Max-Stanh": ("mux", "max", "stanh_fifth"),
}


def _feb_config(block: str, n: int, length: int, segment: int) -> FebConfig:
    ip, pool, act = FEB_BLOCKS[block]
    try:
        return FebConfig(
            ip_variant=ip, pool_variant=pool, act_variant=act, n_inputs=n, length=length, segment=segment
        )
    except ValidationError as exc:
        raise ExperimentConfigError(f"{block} at N={n}, L={length}: {exc.errors()[0]['msg']}") from exc


def _feb_cell(ctx: RunContext, params: dict[str, CellValue], cfg: FebConfig) -> CellResult:
    stats = feb_inaccuracy(cfg, ctx.trials, seed=ctx.cell_seed(params))
    return CellResult(stats.mean_abs_error, stats.std_dev, stats.trials)


def _plan_fig9(ctx: RunContext) -> ExperimentPlan:
    grid: dict[str, list[CellValue]] = {
        "block": list(FEB_BLOCKS),
        "n": ctx.inputs([16, 32, 64, 128, 256]),
        "length": ctx.lengths([512, 1024, 2048, 4096]),
    }
    cells = []
    for p in _product(grid):
        cfg = _feb_config(str(p["block"]), int(p["n"]), int(p["length"]), ctx.segment)
        cells.append(_cell(p, lambda p=p, cfg=cfg: _feb_cell(ctx, p, cfg)))
    return ExperimentPlan(list(grid), grid, cells, {"segment": ctx.segment, "reference": "tanh(gain * pool(z))"})


# ── Network-level sweeps ───────────────────────────────────────────────────


def _external(ctx: RunContext, name: str, required: bool) -> Optional[tuple[Path, Path]]:
    weights, mnist = ctx.cfg.weights_path, ctx.cfg.mnist_dir
    if weights and mnist:
        return Path(weights), Path(mnist)
    if required or weights or mnist:
        missing = [flag for flag, value in (("--weights", weights), ("--mnist", mnist)) if not value]
        raise ExternalDataRequiredError(
            f"{name} measures MNIST error rates and needs trained weights and MNIST files; missing {', '.join(missing)}"
        )
    return None


def _random_images(shape: tuple[int, int, int], count: int, seed: int) -> list[Image]:
    rng = np.random.default_rng([seed, 0x1A6E])
    h, w, _ = shape
    return [Image(rng.uniform(-1.0, 1.0, (h, w))) for _ in range(count)]


def _stage_precisions(spec: NetworkSpec, base: Sequence[int], stage: str, w: int) -> list[int]:
    groups = spec.stages()
    chosen = range(len(base)) if stage == "all" else groups[int(stage)]
    return [w if i in chosen else p for i, p in enumerate(base)]


def _mismatch(reference: Sequence[int], scores: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([int(np.argmax(s)) != r for s, r in zip(scores, reference)], dtype=np.float64)


def _plan_fig10(ctx: RunContext) -> ExperimentPlan:
    spec = lenet5_spec("max")
    layers: list[CellValue] = [str(i) for i in range(len(spec.stages()))] + ["all"]
    grid: dict[str, list[CellValue]] = {"layer": layers, "precision": ctx.precisions(list(range(2, 13)))}
    meta: dict[str, object] = {}
    data = _external(ctx, "fig10", required=False)

    if data is not None:
        base = load_weights(data[0], expected=spec)
        dataset = load_mnist(data[1]).head(ctx.trials)
        meta["metric"] = "MNIST error rate (float inference on quantized weights)"

        def measure(ws: WeightSet) -> CellResult:
            net = build_network(spec, ws)
            rate = evaluate(net, dataset, "float")
            return CellResult(rate, math.sqrt(rate * (1.0 - rate)), len(dataset))

    else:
        warning = "no trained weights given: random weights, disagreement with full-precision weights on random images"
        logger.warning("[EXPERIMENT] fig10: %s", warning)
        meta["warnings"] = [warning]
        meta["metric"] = "argmax disagreement with the full-precision network"
        base = random_weight_set(spec, [FULL_PRECISION] * len(spec.layers), seed=ctx.seed)
        images = _random_images(spec.input_shape, ctx.trials, ctx.seed)
        ref_net = build_network(spec, base)
        reference = [int(np.argmax(forward_float(ref_net, img))) for img in images]

        def measure(ws: WeightSet) -> CellResult:
            net = build_network(spec, ws)
            flips = _mismatch(reference, [forward_float(net, img) for img in images])
            return CellResult(*_stats(flips), len(images))

    def compute(p: dict[str, CellValue]) -> CellResult:
        precisions = _stage_precisions(spec, base.precisions, str(p["layer"]), int(p["precision"]))
        return measure(apply_layer_precisions(base, precisions))

    cells = [_cell(p, lambda p=p: compute(p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells, meta)


def toy_spec() -> NetworkSpec:
    """A small four-layer network with the same stage structure as LeNet-5."""
    return NetworkSpec(
        input_shape=(12, 12, 1),
        layers=(
            ConvPoolLayer(filters=4, kernel=5),
            ConvPoolLayer(filters=8, kernel=3),
            FullyConnectedLayer(outputs=16),
            OutputLayer(classes=10),
        ),
    )


def _plan_fig11(ctx: RunContext) -> ExperimentPlan:
    data = _external(ctx, "fig11", required=False)
    spec = lenet5_spec("max") if data is not None else toy_spec()
    groups = spec.stages()
    grid: dict[str, list[CellValue]] = {
        "layer": list(range(len(groups))),
        "amplitude": [NOISE_AMPLITUDE],
    }
    meta: dict[str, object] = {"noise": "uniform in [-a, a], added to the first layer of the stage"}

    if data is not None:
        net = build_network(spec, load_weights(data[0], expected=spec))
        dataset = load_mnist(data[1]).head(ctx.trials)
        meta["metric"] = "MNIST error rate with noise in one stage"

        def compute(p: dict[str, CellValue]) -> CellResult:
            target = groups[int(p["layer"])][0]
            rng = ctx.rng(ctx.cell_key(p), 0)
            scores = [
                forward_float(net, img, layer_noise={target: float(p["amplitude"])}, rng=rng) for img in dataset
            ]
            labels = [img.label for img in dataset]
            wrong = _mismatch(labels, scores)  # type: ignore[arg-type]
            return CellResult(*_stats(wrong), len(dataset))

    else:
        warning = "no trained weights given: toy network, one random weight set and image per trial"
        logger.warning("[EXPERIMENT] fig11: %s", warning)
        meta["warnings"] = [warning]
        meta["metric"] = "argmax flips caused by the noise"

        def compute(p: dict[str, CellValue]) -> CellResult:
            target = groups[int(p["layer"])][0]
            key = ctx.cell_key(p)
            flips = np.empty(ctx.trials)
            for t in range(ctx.trials):
                trial_seed = (ctx.seed << 20) + t
                net = build_network(spec, random_weight_set(spec, [FULL_PRECISION] * len(spec.layers), seed=trial_seed))
                image = _random_images(spec.input_shape, 1, trial_seed)[0]
                clean = forward_float(net, image)
                noisy = forward_float(
                    net, image, layer_noise={target: float(p["amplitude"])}, rng=ctx.rng(key, t)
                )
                flips[t] = float(int(np.argmax(clean)) != int(np.argmax(noisy)))
            return CellResult(*_stats(flips), ctx.trials)

    cells = [_cell(p, lambda p=p: compute(p)) for p in _product(grid)]
    return ExperimentPlan(list(grid), grid, cells, meta)


# (No., pooling, L, stage variants, published inaccuracy %)
TABLE6_CONFIGS: tuple[tuple[int, str, int, tuple[str, str, str], float], ...] = (
    (1, "max", 1024, ("mux", "mux", "apc"), 2.64),
    (2, "max", 1024, ("mux", "apc", "apc"), 2.23),
    (3, "max", 512, ("apc", "mux", "apc"), 1.91),
    (4, "max", 512, ("apc", "apc", "apc"), 1.68),
    (5, "max", 256, ("apc", "mux", "apc"), 2.13),
    (6, "max", 256, ("apc", "apc", "apc"), 1.74),
    (7, "avg", 1024, ("mux", "apc", "apc"), 3.06),
    (8, "avg", 1024, ("apc", "apc", "apc"), 2.58),
    (9, "avg", 512, ("mux", "apc", "apc"), 3.16),
    (10, "avg", 512, ("apc", "apc", "apc"), 2.65),
    (11, "avg", 256, ("mux", "apc", "apc"), 3.36),
    (12, "avg", 256, ("apc", "apc", "apc"), 2.76),
)


def _table6_params(number: int, pooling: str, length: int, variants: tuple[str, str, str]) -> dict[str, CellValue]:
    return {"config": number, "pooling": pooling, "length": length, "layers": "-".join(v.upper() for v in variants)}


def table6_grid() -> dict[str, list[CellValue]]:
    """The twelve configurations as aligned per-key lists: entry i of every list is configuration i."""
    rows = [_table6_params(number, pooling, length, variants) for number, pooling, length, variants, _ in TABLE6_CONFIGS]
    return {key: [row[key] for row in rows] for key in rows[0]}


def _plan_table6(ctx: RunContext) -> ExperimentPlan:
    weights_path, mnist_dir = _external(ctx, "table6", required=True)  # type: ignore[misc]
    dataset = load_mnist(mnist_dir).head(ctx.trials)
    cells = []
    for number, pooling, length, variants, published in TABLE6_CONFIGS:
        spec = lenet5_spec(pooling, variants, length=length, segment=ctx.segment)  # type: ignore[arg-type]
        params = _table6_params(number, pooling, length, variants)

        def compute(spec: NetworkSpec = spec, params: dict[str, CellValue] = params, published: float = published) -> CellResult:
            net = build_network(spec, load_weights(weights_path, expected=spec))
            run = ScRunConfig(length=spec.length, seed=ctx.cell_seed(params) & 0x7FFFFFFF)
            rate = evaluate(net, dataset, run)
            return CellResult(
                rate * 100.0,
                math.sqrt(rate * (1.0 - rate)) * 100.0,
                len(dataset),
                {"float_error_pct": evaluate(net, dataset, "float") * 100.0, "published_pct": published},
            )

        cells.append(_cell(params, compute))
    grid = table6_grid()
    meta = {"metric": "MNIST error rate of SC inference, %", "grid_layout": "aligned lists, one entry per configuration"}
    return ExperimentPlan(list(grid), grid, cells, meta)


# ── Registry ───────────────────────────────────────────────────────────────


def _product(grid: dict[str, list[CellValue]]) -> list[dict[str, CellValue]]:
    rows: list[dict[str, CellValue]] = [{}]
    for key, values in grid.items():
        rows = [{**row, key: value} for row in rows for value in values]
    return rows


_SWEEP = frozenset({"lengths", "inputs"})

EXPERIMENTS: dict[str, Experiment] = {
    e.id: e
    for e in (
        Experiment(
            "table1",
            "OR-gate inner product, absolute error",
            "mean |f * decode(OR) - sum(x*w)| at the best prescale factor f",
            {"encoding": ["unipolar", "bipolar"], "n": [16, 32, 64], "length": [1024]},
            _plan_table1,
            _SWEEP,
        ),
        Experiment(
            "table2",
            "MUX inner product, absolute error",
            "mean |N * decode(MUX) - sum(x*w)|",
            {"n": [16, 32, 64], "length": [512, 1024, 2048, 4096]},
            _plan_table2,
            _SWEEP,
        ),
        Experiment(
            "table3",
            "approximate parallel counter, relative error",
            "mean |sum(count_approx) - sum(count_exact)| / sum(count_exact), %",
            {"n": [16, 32, 64], "length": [128, 256, 384, 512]},
            _plan_table3,
            _SWEEP,
        ),
        Experiment(
            "table4",
            "hardware max pooling, deviation from the true maximum",
            "mean |hw - sw| in bipolar units, sw the maximum of the decoded candidates",
            {"inputs": [4, 9, 16], "length": [128, 256, 384, 512]},
            _plan_table4,
            _SWEEP | {"segment"},
        ),
        Experiment(
            "table5",
            "Stanh relative inaccuracy",
            "mean |Stanh(K, 2u/K) - tanh(u)| / mean |tanh(u)|, %",
            {"states": list(range(8, 21, 2)), "length": [8192]},
            _plan_table5,
            _SWEEP,
        ),
        Experiment(
            "fig9",
            "feature-extraction block inaccuracy",
            "mean |FEB - tanh(gain * pool(z))|",
            {"block": list(FEB_BLOCKS), "n": [16, 32, 64, 128, 256], "length": [512, 1024, 2048, 4096]},
            _plan_fig9,
            _SWEEP | {"segment"},
        ),
        Experiment(
            "fig10",
            "weight precision sweep",
            "error rate, or argmax disagreement without trained weights",
            {"layer": ["0", "1", "2", "all"], "precision": list(range(2, 13))},
            _plan_fig10,
            frozenset({"precisions"}),
            "optional",
        ),
        Experiment(
            "fig11",
            "layer-wise noise sensitivity",
            "error rate, or argmax flips without trained weights",
            {"layer": [0, 1, 2], "amplitude": [NOISE_AMPLITUDE]},
            _plan_fig11,
            frozenset(),
            "optional",
        ),
        Experiment(
            "table6",
            "layer-wise LeNet-5 configurations",
            "MNIST error rate of SC inference, %",
            {"config": [c[0] for c in TABLE6_CONFIGS]},
            _plan_table6,
            frozenset({"segment"}),
            "required",
        ),
    )
}


def get_experiment(experiment_id: str) -> Experiment:
    try:
        return EXPERIMENTS[experiment_id]
    except KeyError:
        raise ExperimentConfigError(
            f"unknown experiment {experiment_id!r}; expected one of {', '.join(EXPERIMENTS)}"
        ) from None


def check_overrides(experiment: Experiment, cfg: ExperimentConfig) -> None:
    given = {name for name in ("lengths", "inputs", "precisions", "segment") if getattr(cfg, name) is not None}
    unsupported = sorted(given - experiment.overrides)
    if unsupported:
        raise ExperimentConfigError(f"{experiment.id} does not take overrides for {', '.join(unsupported)}")


__all__ = [
    "AVERAGING",
    "CellResult",
    "Cell",
    "ExperimentPlan",
    "RunContext",
    "Experiment",
    "EXPERIMENTS",
    "FEB_BLOCKS",
    "TABLE6_CONFIGS",
    "toy_spec",
    "table6_grid",
    "get_experiment",
    "check_overrides",
]
