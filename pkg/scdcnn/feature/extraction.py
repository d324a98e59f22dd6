"""
feature/extraction.py — Feature-extraction blocks (FEBs).

An FEB cascades four inner-product blocks over the four receptive fields of a
2×2 pooling window, one pooling block and one activation block:

    MUX-Avg-Stanh   MUX-Max-Stanh(fifth)   APC-Avg-Btanh   APC-Max-Btanh

The software reference each block is measured against is
tanh(gain · pool(z_1..z_4)) on the exact inner products z_j, where gain is the
slope the configured activation realises (see ``transfer_gain``).
"""
from __future__ import annotations

import logging
from typing import Literal, Optional

import numpy as np

from scdcnn.blocks.activation import btanh_matrix, optimal_states, stanh_matrix, transfer_gain
from scdcnn.blocks.pooling import POOL_WINDOW, avg_pool, max_pool_hw
from scdcnn.core.errors import ContractError
from scdcnn.core.models import Boundary, ErrorStats, FebConfig, GeneratorMode
from scdcnn.stochastic.arithmetic import apc_counts, multiply_bits, mux_bits
from scdcnn.stochastic.sng import StreamFactory
from scdcnn.stochastic.streams import BinaryStream, BitStream, decode_bits

logger = logging.getLogger(__name__)

InputDistribution = Literal["uniform_signed"]


def resolve_states(cfg: FebConfig) -> int:
    """K from the config, or the sizing rule of the block kind."""
    if cfg.states is not None:
        return cfg.states
    return optimal_states(cfg.kind, cfg.n_inputs, cfg.length)


def activation_boundary(cfg: FebConfig) -> Boundary:
    return "fifth" if cfg.act_variant == "stanh_fifth" else "half"


def _check_operands(cfg: FebConfig, fields: np.ndarray, weights: np.ndarray) -> None:
    if fields.shape != (POOL_WINDOW, cfg.n_inputs):
        raise ContractError(
            f"receptive fields must be {POOL_WINDOW}x{cfg.n_inputs}, got {'x'.join(map(str, fields.shape))}"
        )
    if weights.shape != (cfg.n_inputs,):
        raise ContractError(f"filter must have {cfg.n_inputs} weights, got {weights.size}")


def feb_forward(
    cfg: FebConfig,
    receptive_fields: np.ndarray,
    filter_weights: np.ndarray,
    factory: StreamFactory,
) -> float:
    """Run one FEB bit-exactly and return its decoded output."""
    fields = np.asarray(receptive_fields, dtype=np.float64)
    weights = np.asarray(filter_weights, dtype=np.float64)
    _check_operands(cfg, fields, weights)
    n, length = cfg.n_inputs, cfg.length

    x_bits = factory.encode_matrix(fields, "bipolar", length).reshape(POOL_WINDOW, n, length)
    w_bits = factory.encode_matrix(np.tile(weights, POOL_WINDOW), "bipolar", length)
    products = multiply_bits(x_bits, w_bits.reshape(POOL_WINDOW, n, length), "bipolar")
    K = resolve_states(cfg)

    if cfg.ip_variant == "mux":
        sums = [BitStream(mux_bits(products[j], factory.generator(length))) for j in range(POOL_WINDOW)]
        if cfg.pool_variant == "avg":
            pooled = avg_pool(sums, "stochastic", factory.generator(length))
        else:
            pooled = max_pool_hw(sums, cfg.segment, "stochastic", factory.generator())
        out = stanh_matrix(pooled.bits, K, activation_boundary(cfg))
    else:
        mode = cfg.resolved_apc_mode
        counts = [BinaryStream(apc_counts(products[j], mode), n) for j in range(POOL_WINDOW)]
        if cfg.pool_variant == "avg":
            pooled = avg_pool(counts, "binary")
        else:
            pooled = max_pool_hw(counts, cfg.segment, "binary", factory.generator())
        out = btanh_matrix(pooled.counts, n, K)
    return float(decode_bits(out, "bipolar"))


def feb_reference(cfg: FebConfig, receptive_fields: np.ndarray, filter_weights: np.ndarray) -> float:
    fields = np.asarray(receptive_fields, dtype=np.float64)
    weights = np.asarray(filter_weights, dtype=np.float64)
    _check_operands(cfg, fields, weights)
    z = fields @ weights
    pooled = float(z.mean() if cfg.pool_variant == "avg" else z.max())
    gain = transfer_gain(cfg.act_variant, cfg.pool_variant, resolve_states(cfg), cfg.n_inputs)
    return float(np.tanh(gain * pooled))


def _sample_operands(
    rng: np.random.Generator, n: int, distribution: InputDistribution
) -> tuple[np.ndarray, np.ndarray]:
    if distribution != "uniform_signed":
        raise ContractError(f"unknown input distribution {distribution!r}")
    return rng.uniform(-1.0, 1.0, (POOL_WINDOW, n)), rng.uniform(-1.0, 1.0, n)


def feb_trial_error(
    cfg: FebConfig,
    seed: int,
    trial: int,
    input_distribution: InputDistribution = "uniform_signed",
    *,
    sng_width: Optional[int] = None,
    generator_mode: GeneratorMode = "lfsr",
) -> float:
    """|FEB − reference| for one trial; inputs and generators both derive from (seed, trial)."""
    rng = np.random.default_rng([seed, trial])
    fields, weights = _sample_operands(rng, cfg.n_inputs, input_distribution)
    factory = StreamFactory([seed, trial, 1], width=sng_width, mode=generator_mode)
    return abs(feb_forward(cfg, fields, weights, factory) - feb_reference(cfg, fields, weights))


def feb_inaccuracy(
    cfg: FebConfig,
    trials: int,
    input_distribution: InputDistribution = "uniform_signed",
    seed: int = 1,
    *,
    sng_width: Optional[int] = None,
    generator_mode: GeneratorMode = "lfsr",
) -> ErrorStats:
    if trials < 1:
        raise ContractError(f"trials must be >= 1, got {trials}")
    errors = np.array(
        [
            feb_trial_error(
                cfg, seed, t, input_distribution, sng_width=sng_width, generator_mode=generator_mode
            )
            for t in range(trials)
        ]
    )
    logger.debug(
        "[FEB] %s N=%d L=%d K=%d: mean %.4f over %d trials",
        cfg.label,
        cfg.n_inputs,
        cfg.length,
        resolve_states(cfg),
        errors.mean(),
        trials,
    )
    return ErrorStats(
        mean_abs_error=float(errors.mean()),
        std_dev=float(errors.std()),
        trials=trials,
        per_trial_seed_base=seed,
    )


__all__ = [
    "InputDistribution",
    "resolve_states",
    "activation_boundary",
    "feb_forward",
    "feb_reference",
    "feb_trial_error",
    "feb_inaccuracy",
]
