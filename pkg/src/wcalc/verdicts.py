"""Three-valued verdicts and finite-horizon trajectory classification.

Checks over a finite horizon cannot prove limit statements; a verdict is
Holds or Fails only when the window contains a certificate (a frozen sup, a
violating index), and Undetermined otherwise, always with the measured
evidence attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import Config

HOLDS = "Holds"
FAILS = "Fails"
UNDETERMINED = "Undetermined"


@dataclass
class Verdict:
    subject: str
    status: str
    horizon: int
    witness: object = None
    evidence: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "status": self.status,
            "horizon": self.horizon,
            "witness": self.witness,
            "evidence": self.evidence,
        }


def decimate(values, limit: int = 16) -> list:
    """Evenly thinned copy for evidence payloads."""
    vals = list(values)
    if len(vals) <= limit:
        return vals
    step = (len(vals) - 1) / (limit - 1)
    return [vals[round(i * step)] for i in range(limit)]


def fit_line(xs, ys) -> tuple[float, float]:
    """Least-squares slope/intercept; returns (0, mean) for degenerate xs."""
    n = len(xs)
    if n == 0:
        return 0.0, 0.0
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        return 0.0, my
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


FROZEN = "frozen"
FLAT = "flat"
UP = "up"
DOWN = "down"


@dataclass
class TailReport:
    trend: str
    sup: float
    sup_index: int  # position in the index list, not the index value
    slope: float
    tail_first: float
    tail_last: float

    @property
    def stabilized(self) -> bool:
        return self.trend in (FROZEN, FLAT, DOWN)

    def summary(self) -> dict:
        return {
            "trend": self.trend,
            "sup": self.sup,
            "sup_position": self.sup_index,
            "log_slope": self.slope,
            "tail_first": self.tail_first,
            "tail_last": self.tail_last,
        }


def classify_trajectory(indices, values, cfg: Config) -> TailReport:
    """Classify a defect trajectory sampled at increasing integer indices.

    frozen: the max was attained before the last quarter and the last
        quarter never reaches it again.
    Otherwise the least-squares slope of value against ln(index) over the
    last half decides: above cfg.log_slope_tol the trajectory is growing
    beyond anything a bounded defect produces on this window (up), below
    the negative tolerance it is sinking (down), else flat.  Slower-than-log
    growth is indistinguishable from convergence on a finite window; that
    boundary is exactly what the tolerance encodes.
    """
    vals = list(values)
    idx = list(indices)
    n = len(vals)
    if n == 0:
        raise ValueError("empty trajectory")
    if n != len(idx):
        raise ValueError("indices and values must have equal length")
    sup = max(vals)
    sup_pos = vals.index(sup)
    q3 = (3 * n) // 4
    tail = vals[q3:] or vals[-1:]
    half = vals[n // 2:]
    hidx = idx[n // 2:]
    slope, _ = fit_line([math.log(i) for i in hidx], half)
    if n >= 8 and sup_pos < q3 and max(tail) <= sup + cfg.comparison_slack:
        trend = FROZEN
    elif n < 8:
        # window too short to call growth; only an exact freeze counts
        trend = FLAT if all(v <= vals[0] + cfg.comparison_slack for v in vals) else UP
    elif slope > cfg.log_slope_tol:
        trend = UP
    elif slope < -cfg.log_slope_tol:
        trend = DOWN
    else:
        trend = FLAT
    return TailReport(
        trend=trend,
        sup=sup,
        sup_index=sup_pos,
        slope=slope,
        tail_first=tail[0],
        tail_last=tail[-1],
    )


def running_sup_stabilized(values, cfg: Config) -> tuple[bool, float]:
    """Stabilization rule for running-sup trajectories.

    The running sup is non-decreasing; stabilized means it moved by less
    than cfg.stabilize_rel over the last quarter of the window, relative
    to the trajectory's own scale (max of 1, |sup| and the value range, so
    a sup crawling through the last fraction of a large initial climb
    still counts as settled).
    """
    vals = list(values)
    if not vals:
        raise ValueError("empty trajectory")
    sups = []
    cur = -math.inf
    for v in vals:
        cur = max(cur, v)
        sups.append(cur)
    q3 = (3 * len(sups)) // 4
    anchor = sups[q3] if q3 < len(sups) else sups[-1]
    moved = sups[-1] - anchor
    scale = max(1.0, abs(sups[-1]), max(vals) - min(vals))
    return moved <= cfg.stabilize_rel * scale, sups[-1]
