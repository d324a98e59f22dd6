"""
core/models.py — Shared cross-module Pydantic models.

Used by: blocks (FEB configuration), feature (error statistics), network
         (run configuration), harness + gateway (experiment config, reports).
Rule: configuration and report shapes live here; numpy-backed value types
      (bit-streams, weight blocks, images) live beside their operations.
"""
from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

# ── Vocabulary ─────────────────────────────────────────────────────────────
Encoding = Literal["unipolar", "bipolar"]
GeneratorMode = Literal["lfsr", "counter_exact"]
ApcMode = Literal["exact", "approximate"]
IpVariant = Literal["or", "mux", "apc", "two_line"]
FebIpVariant = Literal["mux", "apc"]
PoolVariant = Literal["avg", "max"]
ActVariant = Literal["stanh", "stanh_fifth", "btanh"]
Boundary = Literal["half", "fifth"]
Domain = Literal["stochastic", "binary"]
FebKind = Literal["mux_avg", "mux_max", "apc_any"]
ReportFormat = Literal["csv", "json"]
ExperimentId = Literal[
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "fig9",
    "fig10",
    "fig11",
    "table6",
]

EXPERIMENT_IDS: tuple[str, ...] = (
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "fig9",
    "fig10",
    "fig11",
    "table6",
)


# ── Feature-extraction blocks ──────────────────────────────────────────────
class FebConfig(BaseModel):
    """One inner-product × pooling × activation composition."""

    model_config = {"frozen": True}

    ip_variant: FebIpVariant
    pool_variant: PoolVariant
    act_variant: ActVariant
    n_inputs: int = Field(ge=1)
    length: int = Field(1024, ge=1)
    segment: int = Field(16, ge=1)
    states: Optional[int] = None
    apc_mode: Literal["exact", "approximate", "auto"] = "auto"

    @field_validator("states")
    @classmethod
    def states_even(cls, value: Optional[int]) -> Optional[int]:
        if value is None:
            return None
        if value < 2 or value % 2:
            raise ValueError(f"state count K must be even and >= 2, got {value}")
        return value

    @model_validator(mode="after")
    def legal_composition(self) -> "FebConfig":
        if self.ip_variant == "mux" and self.act_variant == "btanh":
            raise ValueError("MUX inner products feed Stanh, not Btanh")
        if self.ip_variant == "apc" and self.act_variant != "btanh":
            raise ValueError("APC inner products feed Btanh only")
        if self.ip_variant == "mux" and self.pool_variant == "max" and self.act_variant != "stanh_fifth":
            raise ValueError("MUX max pooling requires the fifth-boundary Stanh")
        if self.apc_mode == "approximate" and self.n_inputs % 16:
            raise ValueError(
                f"approximate APC needs N to be a multiple of 16, got {self.n_inputs}"
            )
        if self.pool_variant == "max" and self.length % self.segment:
            raise ValueError(
                f"stream length {self.length} is not a multiple of segment {self.segment}"
            )
        return self

    @property
    def kind(self) -> FebKind:
        if self.ip_variant == "apc":
            return "apc_any"
        return "mux_max" if self.pool_variant == "max" else "mux_avg"

    @property
    def label(self) -> str:
        act = {"stanh": "Stanh", "stanh_fifth": "Stanh", "btanh": "Btanh"}[self.act_variant]
        return f"{self.ip_variant.upper()}-{self.pool_variant.capitalize()}-{act}"

    @property
    def resolved_apc_mode(self) -> ApcMode:
        if self.apc_mode != "auto":
            return self.apc_mode
        return "approximate" if self.n_inputs % 16 == 0 else "exact"


class ErrorStats(BaseModel):
    mean_abs_error: float = Field(ge=0.0)
    std_dev: float = Field(ge=0.0)
    trials: int = Field(ge=1)
    per_trial_seed_base: int


# ── Network runs ───────────────────────────────────────────────────────────
class LayerOverride(BaseModel):
    """Per-layer replacement of the network's block choices for one SC run."""

    ip_variant: Optional[FebIpVariant] = None
    act_variant: Optional[ActVariant] = None
    states: Optional[int] = None
    apc_mode: Optional[Literal["exact", "approximate", "auto"]] = None


class ScRunConfig(BaseModel):
    length: int = Field(1024, ge=1)
    seed: int = 1
    pooling_mode: Optional[PoolVariant] = None
    generator_mode: GeneratorMode = "lfsr"
    sng_width: Optional[int] = Field(None, ge=8, le=24)
    layer_overrides: dict[int, LayerOverride] = Field(default_factory=dict)


# ── Harness ────────────────────────────────────────────────────────────────
class ExperimentConfig(BaseModel):
    experiment: ExperimentId
    trials: Optional[int] = Field(None, ge=1)
    seed: int = Field(1, ge=0)
    lengths: Optional[list[int]] = None
    inputs: Optional[list[int]] = None
    precisions: Optional[list[int]] = None
    segment: Optional[int] = Field(None, ge=1)
    weights_path: Optional[str] = None
    mnist_dir: Optional[str] = None
    out_path: Optional[str] = None
    format: ReportFormat = "csv"
    quick: bool = False

    @field_validator("lengths", "inputs")
    @classmethod
    def positive_entries(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is None:
            return None
        if not value or any(v < 1 for v in value):
            raise ValueError("list overrides must be non-empty and positive")
        return value

    @field_validator("precisions")
    @classmethod
    def precision_range(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is None:
            return None
        if not value or any(not 1 <= v <= 64 for v in value):
            raise ValueError("precisions must lie in [1, 64]")
        return value


CellValue = Union[int, float, str]


class ReportCell(BaseModel):
    params: dict[str, CellValue]
    mean: float
    std: float
    trials: int
    extras: dict[str, CellValue] = Field(default_factory=dict)


class Report(BaseModel):
    experiment: ExperimentId
    grid_keys: list[str]
    grid: dict[str, list[CellValue]] = Field(default_factory=dict)
    cells: list[ReportCell] = Field(default_factory=list)
    seed: int
    wall_time_s: float = 0.0
    tool_version: str
    meta: dict[str, Any] = Field(default_factory=dict)


__all__ = [
    "Encoding",
    "GeneratorMode",
    "ApcMode",
    "IpVariant",
    "FebIpVariant",
    "PoolVariant",
    "ActVariant",
    "Boundary",
    "Domain",
    "FebKind",
    "ReportFormat",
    "ExperimentId",
    "EXPERIMENT_IDS",
    "FebConfig",
    "ErrorStats",
    "LayerOverride",
    "ScRunConfig",
    "ExperimentConfig",
    "CellValue",
    "ReportCell",
    "Report",
]
