from __future__ import annotations

import logging

from fastapi import APIRouter, HTTPException, Response
from pydantic import ValidationError

from scdcnn.core.errors import (
    ExperimentConfigError,
    ExternalDataRequiredError,
    FormatError,
    ParseError,
    ScdcnnError,
)
from scdcnn.core.models import ErrorStats, ExperimentConfig, FebConfig, Report
from scdcnn.feature.extraction import feb_inaccuracy
from scdcnn.gateway.api.schemas import ExperimentInfo, ExperimentRunRequest, FebRequest
from scdcnn.harness.experiments import EXPERIMENTS
from scdcnn.harness.report import render_csv
from scdcnn.harness.runner import run_experiment
from scdcnn.utils.text import is_known_experiment, normalize_experiment_id

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/experiments", response_model=list[ExperimentInfo])
def list_experiments() -> list[ExperimentInfo]:
    return [
        ExperimentInfo(
            id=e.id, title=e.title, metric=e.metric, default_grid=e.defaults, external_data=e.external
        )
        for e in EXPERIMENTS.values()
    ]


@router.post("/experiments/run", response_model=Report)
def run(request: ExperimentRunRequest) -> Report | Response:
    """Run one experiment synchronously; the full report as JSON, or its CSV table when format is csv."""
    experiment = normalize_experiment_id(request.experiment)
    if not is_known_experiment(experiment):
        raise HTTPException(status_code=422, detail=f"unknown experiment {request.experiment!r}")
    try:
        cfg = ExperimentConfig(experiment=experiment, **request.model_dump(exclude={"experiment"}))
        report = run_experiment(cfg)
    except (ValidationError, ExperimentConfigError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ExternalDataRequiredError as exc:
        raise HTTPException(status_code=424, detail=str(exc)) from exc
    except (OSError, ParseError, FormatError) as exc:
        logger.error("[RUN] %s failed reading its inputs: %s", experiment, exc)
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    except ScdcnnError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except Exception as exc:
        logger.exception("[RUN] %s failed", experiment)
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    if request.format == "csv":
        return Response(render_csv(report), media_type="text/csv")
    return report


@router.post("/blocks/feb", response_model=ErrorStats)
def feb(request: FebRequest) -> ErrorStats:
    """Mean absolute error of one feature-extraction block against its software reference."""
    act = request.act_variant
    if act is None:
        act = "btanh" if request.ip_variant == "apc" else ("stanh_fifth" if request.pool_variant == "max" else "stanh")
    try:
        cfg = FebConfig(act_variant=act, **request.model_dump(exclude={"act_variant", "trials", "seed"}))
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=exc.errors()[0]["msg"]) from exc
    try:
        return feb_inaccuracy(cfg, request.trials, seed=request.seed)
    except Exception as exc:
        logger.exception("[RUN] FEB %s failed", cfg.label)
        raise HTTPException(status_code=500, detail=str(exc)) from exc
