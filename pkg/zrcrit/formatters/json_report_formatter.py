"""JSON formatter for run metadata and check reports."""

import json
import math
from datetime import datetime
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel

from .. import __version__
from .base import ResultFormatter


def to_jsonable(value: Any) -> Any:
    """Convert models, numpy values and non-finite floats to plain JSON values."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        # JSON has no infinities
        return None
    return value


class JsonReportFormatter(ResultFormatter):
    """JSON document with version, generation time and the given payload."""

    def format(self, payload: Any) -> str:
        """
        Format a metadata payload as JSON.

        Args:
            payload: Mapping or pydantic model

        Returns:
            JSON string
        """
        data = {
            "version": __version__,
            "generated_at": datetime.now().isoformat(),
            **to_jsonable(payload),
        }
        return json.dumps(data, ensure_ascii=False, indent=2)
