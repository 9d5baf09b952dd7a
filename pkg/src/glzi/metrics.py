"""Figure-level reductions: fringe contrast, back-action, deficit scaling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFit, EmptyInput


def contrast(p_e: Sequence[float]) -> float:
    """max - min of the excited-state population over the sampled fringe.

    Grid extremes define the contrast; no interpolation or fitting.
    """
    values = np.asarray(p_e, dtype=float)
    if values.size < 2:
        raise EmptyInput(f"need at least 2 fringe samples, got {values.size}")
    return float(values.max() - values.min())


def backaction(delta_n: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of Delta n over the phase grid."""
    values = np.asarray(delta_n, dtype=float)
    if values.size == 0:
        raise EmptyInput("no back-action samples")
    return float(values.mean()), float(values.std(ddof=0))


@dataclass(frozen=True)
class DeficitFit:
    slope: float
    intercept: float
    r2: float
    n_points: int


def contrast_deficit_fit(nbars: Sequence[float], contrasts: Sequence[float],
                         c_classical: float) -> DeficitFit:
    """Least-squares line through (1/nbar, C_cl - C).

    Returns the slope, intercept, and coefficient of determination.  Raises
    DegenerateFit when the abscissa carries no spread (e.g. duplicated
    points) or fewer than two samples are given.
    """
    nb = np.asarray(nbars, dtype=float)
    cs = np.asarray(contrasts, dtype=float)
    if nb.size != cs.size:
        raise DegenerateFit(f"size mismatch: {nb.size} nbars vs {cs.size} contrasts")
    if nb.size < 2:
        raise DegenerateFit(f"need at least 2 points, got {nb.size}")
    x = 1.0 / nb
    y = c_classical - cs
    if np.ptp(x) == 0.0:
        raise DegenerateFit("all abscissa values identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return DeficitFit(slope=float(slope), intercept=float(intercept),
                      r2=r2, n_points=int(nb.size))
