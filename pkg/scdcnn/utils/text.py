from __future__ import annotations

import re

from scdcnn.core.models import EXPERIMENT_IDS


def normalize_experiment_id(raw: str | None) -> str:
    """Canonical experiment id: "Table 1", "table-1" and "TABLE1" all become "table1"."""
    value = re.sub(r"[\s_.\-]+", "", (raw or "").strip().lower())
    if value.startswith("figure"):
        value = "fig" + value[len("figure"):]
    elif value.startswith("tab") and not value.startswith("table"):
        value = "table" + value[len("tab"):]
    return value


def parse_int_list(text: str | None) -> list[int] | None:
    """Comma-separated integers ("512,1024") → [512, 1024]; None or blank stays None."""
    if text is None or not text.strip():
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from exc


def is_known_experiment(raw: str | None) -> bool:
    return normalize_experiment_id(raw) in EXPERIMENT_IDS
