from __future__ import annotations

from dotenv import load_dotenv
load_dotenv(override=True)

import logging

from fastapi import FastAPI

from scdcnn import __version__
from scdcnn.core.config import settings
from scdcnn.gateway.api import routes

logging.basicConfig(
    level=getattr(logging, settings.SCDCNN_LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s  %(levelname)-8s  %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

app = FastAPI(title="SC-DCNN Simulator API", version=__version__)

app.include_router(routes.router)


@app.get("/health")
def health_check() -> dict:
    """Liveness check."""
    return {"status": "ok"}


__all__ = ["app"]
