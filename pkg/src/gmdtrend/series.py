from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError


def as_values(x) -> np.ndarray:
    """Return ``x`` as a finite 1-D float array, raising InputError otherwise."""
    if isinstance(x, TimeSeries):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"expected a 1-D series, got shape {arr.shape}")
    if arr.size < 1:
        raise InputError("empty series")
    if not np.all(np.isfinite(arr)):
        raise InputError("series contains NaN or infinite values")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations with optional time labels (e.g. years)."""

    values: np.ndarray
    labels: Sequence[str] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "values", as_values(self.values))
        if self.labels is not None and len(self.labels) != self.values.size:
            raise InputError("labels and values differ in length")

    def __len__(self) -> int:
        return int(self.values.size)

    def label(self, index: int) -> str | None:
        """Label of the 1-based observation ``index``."""
        if self.labels is None:
            return None
        return self.labels[index - 1]
