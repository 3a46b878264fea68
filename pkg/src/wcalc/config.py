"""Shared evaluation defaults and heuristic thresholds.

All finite-horizon heuristics read their knobs from one record so that a
report can embed the exact configuration it was produced under and a rerun
with the same record is bit-for-bit reproducible.
"""

from __future__ import annotations

import dataclasses
import math
import os

ENV_HORIZON = "WCALC_HORIZON"


@dataclasses.dataclass(frozen=True)
class Config:
    """Evaluation defaults shared across condition checks and reports.

    horizon: default index horizon for finite checks.
    seed: seed for the deterministic off-diagonal pair sample.
    stabilize_rel: a running-sup trajectory counts as stabilized when it
        moves by less than this relative amount over the last quarter.
    log_slope_tol: a defect trajectory counts as diverging when its
        least-squares slope against ln j over the last half exceeds this.
        Trajectories growing slower than ~log are below the honesty
        boundary of a finite window and classify as stabilized.
    powerfit_margin: a fitted quotient exponent must exceed 1 by this
        margin before a series tail is declared summable.
    root_margin: log gap required between first-quarter max and
        last-quarter min before roots count as empirically divergent.
    offdiag_samples: number of seeded random (j, k) pairs added to the
        diagonal when sampling two-index conditions.
    comparison_slack: absolute slack for order comparisons of computed
        log values (absorbs last-ulp jitter, nothing more).
    grid_t_min/grid_t_max/grid_points: default geometric evaluation grid.
    golden_iters: golden-section refinement steps (rel. width ~4e-9).
    fdb_horizon: default cap for composition-sequence checks.
    omega_index_cap: hard cap for the index search in sup evaluations.
    continuation_steps: extra index-grid candidates generated beyond the
        supplied window when a quantifier search exhausts it.
    l_constants: sample constants standing in for the "for all C > 0"
        quantifier of scaling-stability checks.
    """

    horizon: int = 512
    seed: int = 0
    stabilize_rel: float = 1e-3
    log_slope_tol: float = 0.25
    powerfit_margin: float = 0.1
    root_margin: float = math.log(2.0)
    offdiag_samples: int = 64
    comparison_slack: float = 1e-12
    grid_t_min: float = 1.0
    grid_t_max: float = 1e8
    grid_points: int = 200
    golden_iters: int = 40
    fdb_horizon: int = 60
    omega_index_cap: int = 1 << 26
    continuation_steps: int = 4
    l_constants: tuple[float, ...] = (2.0, 8.0)

    def replace(self, **kwargs) -> "Config":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["l_constants"] = list(self.l_constants)
        return out


def default_config() -> Config:
    """Config with the WCALC_HORIZON environment override applied."""
    cfg = Config()
    env = os.environ.get(ENV_HORIZON)
    if env is not None:
        try:
            horizon = int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_HORIZON} must be an integer, got {env!r}") from exc
        if horizon < 16:
            raise ValueError(f"{ENV_HORIZON} must be >= 16, got {horizon}")
        cfg = cfg.replace(horizon=horizon)
    return cfg
