from __future__ import annotations

import os

from pydantic.v1 import BaseSettings, Field


class Settings(BaseSettings):
    SCDCNN_THREADS: int = Field(
        max(1, os.cpu_count() or 1),
        env="SCDCNN_THREADS",
        description="Upper bound on worker threads used for grid cells and per-image inference.",
    )
    SCDCNN_SNG_WIDTH: int = Field(
        10,
        env="SCDCNN_SNG_WIDTH",
        description="Comparator word width k of every stochastic number generator.",
    )
    SCDCNN_DEFAULT_TRIALS: int = Field(
        500,
        env="SCDCNN_DEFAULT_TRIALS",
        description="Monte Carlo trials per grid cell when a run does not override it.",
    )
    SCDCNN_SEGMENT_LENGTH: int = Field(
        16,
        env="SCDCNN_SEGMENT_LENGTH",
        description="Segment length c of the hardware-oriented max pooling block.",
    )
    SCDCNN_QUICK_FACTOR: float = Field(
        0.1,
        env="SCDCNN_QUICK_FACTOR",
        description="Trial scaling applied by --quick.",
    )
    SCDCNN_LOG_LEVEL: str = Field(
        "INFO",
        env="SCDCNN_LOG_LEVEL",
        description="Root log level for the CLI and the HTTP app.",
    )

    class Config(BaseSettings.Config):
        env_file = ".env"


from dotenv import load_dotenv

load_dotenv(override=True)

settings = Settings(
    SCDCNN_THREADS=max(1, int(os.getenv("SCDCNN_THREADS", str(os.cpu_count() or 1)))),
    SCDCNN_SNG_WIDTH=int(os.getenv("SCDCNN_SNG_WIDTH", "10")),
    SCDCNN_DEFAULT_TRIALS=int(os.getenv("SCDCNN_DEFAULT_TRIALS", "500")),
    SCDCNN_SEGMENT_LENGTH=int(os.getenv("SCDCNN_SEGMENT_LENGTH", "16")),
    SCDCNN_QUICK_FACTOR=float(os.getenv("SCDCNN_QUICK_FACTOR", "0.1")),
    SCDCNN_LOG_LEVEL=os.getenv("SCDCNN_LOG_LEVEL", "INFO"),
)

__all__ = ["Settings", "settings"]
