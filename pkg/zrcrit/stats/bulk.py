"""Partial-sum paths of the bulk and their Brownian-bridge statistics."""

import logging
import math
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..marginal import Marginal
from .batch import SampleBatch

logger = logging.getLogger(__name__)

DEFAULT_POINTS = (0.25, 0.5, 0.75)


class PathMode(str, Enum):
    """X: all sites centered at N/L. Y: sites above L^(1/4) dropped, centered at N - a_L (N - rho_c L)."""

    X = "X"
    Y = "Y"


class BulkPaths(BaseModel):
    """Paths on the grid s = x/L, x = 0..L, one row per replica."""

    mode: PathMode
    grid: np.ndarray
    values: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def at(self, s: float) -> np.ndarray:
        """Values at [sL] / L."""
        L = self.grid.size - 1
        return self.values[:, int(math.floor(s * L))]


def truncation_level(L: int) -> int:
    return int(math.floor(L**0.25))


def bulk_paths(batch: SampleBatch, marginal: Marginal, mode: PathMode = PathMode.X, a_L: Optional[float] = None) -> BulkPaths:
    """Rescaled partial sums (1/(sigma sqrt L)) sum_{x <= sL} (eta_x - center).

    Raises:
        ValueError: If configurations were not kept, or a_L is missing in mode Y
    """
    if batch.eta is None:
        raise ValueError("bulk paths need full configurations; sample with keep_eta")
    L, N = batch.L, batch.N
    x = np.arange(L + 1)
    scale = marginal.sigma * math.sqrt(L)
    if mode is PathMode.X:
        sums = np.zeros((batch.size, L + 1), dtype=np.int64)
        np.cumsum(batch.eta, axis=1, out=sums[:, 1:])
        # L S_x - x N vanishes exactly at x = L
        values = (L * sums - x * N) / (L * scale)
    else:
        if a_L is None:
            raise ValueError("mode Y needs the condensate fraction a_L")
        cap = truncation_level(L)
        truncated = np.where(batch.eta <= cap, batch.eta, 0)
        sums = np.zeros((batch.size, L + 1), dtype=np.int64)
        np.cumsum(truncated, axis=1, out=sums[:, 1:])
        center = N - a_L * (N - marginal.rho_c * L)
        values = (sums - x * center / L) / scale
    return BulkPaths(mode=mode, grid=x / L, values=values)


def path_covariance(paths: BulkPaths, points: Sequence[float] = DEFAULT_POINTS) -> np.ndarray:
    """Empirical covariance matrix of the path values at the given times."""
    columns = np.column_stack([paths.at(s) for s in points])
    return np.atleast_2d(np.cov(columns, rowvar=False))


def bridge_covariance(points: Sequence[float] = DEFAULT_POINTS) -> np.ndarray:
    """min(s, r) - s r."""
    s = np.asarray(points, dtype=float)
    return np.minimum.outer(s, s) - np.outer(s, s)


class DriftSummary(BaseModel):
    """Terminal drift of Y paths and its predicted variance."""

    terminal_variance: float
    slope_variance: float
    predicted_variance: Optional[float] = None
    bridge_correlation: float

    @property
    def relative_error(self) -> Optional[float]:
        if self.predicted_variance is None:
            return None
        return abs(self.terminal_variance / self.predicted_variance - 1.0)


def drift_variance(paths: BulkPaths, lam: Optional[float] = None, a: Optional[float] = None) -> DriftSummary:
    """Variance of the drift of Y paths, read off the endpoint and by least-squares slope.

    The predicted variance is 1 / (1 - lambda (1 - a) / a) when lambda and a are given.
    bridge_correlation is the correlation of the endpoint with the mid-path bridge
    part Y_(1/2) - Y_1 / 2, which should vanish as L grows.
    """
    terminal = paths.values[:, -1]
    s = paths.grid
    slope = paths.values @ s / float(s @ s)
    mid_bridge = paths.at(0.5) - 0.5 * terminal
    correlation = float(np.corrcoef(terminal, mid_bridge)[0, 1]) if terminal.std() > 0 and mid_bridge.std() > 0 else 0.0
    predicted = None
    if lam is not None and a is not None:
        predicted = 1.0 / (1.0 - lam * (1.0 - a) / a)
    logger.debug(f"Drift variance {terminal.var(ddof=1):.4g} (slope {slope.var(ddof=1):.4g}), predicted {predicted}")
    return DriftSummary(
        terminal_variance=float(terminal.var(ddof=1)),
        slope_variance=float(slope.var(ddof=1)),
        predicted_variance=predicted,
        bridge_correlation=correlation,
    )
