from typing import Literal, Optional

from pydantic import BaseModel, Field

from scdcnn.core.models import ActVariant, FebIpVariant, PoolVariant, ReportFormat


class ExperimentRunRequest(BaseModel):
    """What a client sends to launch a run; ids are normalized ("Table 2" → "table2")."""
    experiment: str
    trials: Optional[int] = Field(None, ge=1)
    seed: int = Field(1, ge=0)
    lengths: Optional[list[int]] = None
    inputs: Optional[list[int]] = None
    precisions: Optional[list[int]] = None
    segment: Optional[int] = Field(None, ge=1)
    weights_path: Optional[str] = None
    mnist_dir: Optional[str] = None
    format: ReportFormat = "json"
    quick: bool = False


class ExperimentInfo(BaseModel):
    id: str
    title: str
    metric: str
    default_grid: dict[str, list[int | float | str]]
    external_data: Literal["none", "optional", "required"]


class FebRequest(BaseModel):
    ip_variant: FebIpVariant
    pool_variant: PoolVariant
    act_variant: Optional[ActVariant] = None  # derived from ip/pool when omitted
    n_inputs: int = Field(ge=1)
    length: int = Field(1024, ge=1)
    segment: int = Field(16, ge=1)
    states: Optional[int] = None
    apc_mode: Literal["exact", "approximate", "auto"] = "auto"
    trials: int = Field(100, ge=1, le=10_000)
    seed: int = Field(1, ge=0)
