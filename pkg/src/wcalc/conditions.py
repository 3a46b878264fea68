"""Finite-horizon checks of growth/regularity conditions on one sequence.

Exact per-index conditions (log-convexity, normalization) give Holds/Fails
with a witness.  Asymptotic conditions (moderate growth, derivative
closedness, quotient series, ratio liminfs) give Holds only when the
measured defect trajectory stabilizes inside the window, Undetermined
otherwise; they never fake a proof.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .config import Config
from .errors import InvalidParameterError
from .logdomain import LOG_ZERO, log_add, log_sum
from .sequences import ExponentSequence, WeightSequence
from .verdicts import (
    FAILS,
    HOLDS,
    UNDETERMINED,
    UP,
    Verdict,
    classify_trajectory,
    decimate,
    fit_line,
    running_sup_stabilized,
)

CONDITIONS = (
    "lc", "slc", "normalized", "mg", "dc",
    "nq", "nq_carleman", "beta1", "beta3", "gamma1",
)

# floor used when reading an exponent-sequence growth report: the tail
# estimate of phi_j / j must sit above this to count as a positive gap
EXPONENT_GAP_FLOOR = 0.01


@dataclass(frozen=True)
class ConditionId:
    tag: str
    q: int | None = None

    def label(self) -> str:
        return self.tag if self.q is None else f"{self.tag}(Q={self.q})"


def _need_horizon(horizon: int | None, cfg: Config) -> int:
    h = cfg.horizon if horizon is None else int(horizon)
    if h < 4:
        raise InvalidParameterError("horizon", f"need horizon >= 4, got {h}")
    return h


def _monotone_fails(values: list[float], slack: float) -> int | None:
    """Position of the first drop (i with v[i] < v[i-1] - slack), else None."""
    for i in range(1, len(values)):
        if values[i] < values[i - 1] - slack:
            return i
    return None


def _scan_slack(cfg: Config, magnitudes) -> float:
    """Comparison tolerance scaled to the largest intermediate term.

    Quotient-style quantities are differences of large log terms; their
    float jitter grows with the term magnitude, not with the (often tiny)
    difference itself.
    """
    scale = 1.0
    for v in magnitudes:
        a = abs(v)
        if a > scale:
            scale = a
    return cfg.comparison_slack * scale


def _powerfit_tail(log_indices, log_values, horizon, margin):
    """Fit log v ~ p log j over the tail; log of the integral tail bound
    for sum 1/v beyond the horizon, or None when the fit is too shallow."""
    p, q = fit_line(log_indices, log_values)
    if p <= 1.0 + margin:
        return p, None
    log_tail = -q + (1.0 - p) * math.log(horizon) - math.log(p - 1.0)
    return p, log_tail


def check_condition(
    m: WeightSequence,
    cond: str | ConditionId,
    horizon: int | None = None,
    cfg: Config | None = None,
    Q: int = 2,
) -> Verdict:
    cfg = cfg or Config()
    if isinstance(cond, ConditionId):
        tag = cond.tag
        if cond.q is not None:
            Q = cond.q
    else:
        tag = cond
    if tag not in CONDITIONS:
        raise InvalidParameterError("cond", f"unknown condition {tag!r}; expected one of {CONDITIONS}")
    h = _need_horizon(horizon, cfg)
    fn = _DISPATCH[tag]
    if tag in ("beta1", "beta3"):
        if not isinstance(Q, int) or Q < 2:
            raise InvalidParameterError("Q", f"need integer Q >= 2, got {Q!r}")
        return fn(m, h, cfg, Q)
    return fn(m, h, cfg)


# ---------------------------------------------------------------------------
# exact per-index conditions


def _check_lc(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    terms = [m.log_term(j) for j in range(h + 1)]
    quotients = [terms[j] - terms[j - 1] for j in range(1, h + 1)]
    bad = _monotone_fails(quotients, _scan_slack(cfg, terms))
    ev = {"quotients_log": decimate(quotients)}
    if bad is None:
        return Verdict("lc", HOLDS, h, evidence=ev)
    ev["drop"] = quotients[bad] - quotients[bad - 1]
    return Verdict("lc", FAILS, h, witness=bad + 1, evidence=ev)


def _check_slc(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    terms = [m.log_term(j) for j in range(h + 1)]
    reduced = [terms[j] - terms[j - 1] - math.log(j) for j in range(1, h + 1)]
    bad = _monotone_fails(reduced, _scan_slack(cfg, terms))
    ev = {"reduced_quotients_log": decimate(reduced)}
    if bad is None:
        return Verdict("slc", HOLDS, h, evidence=ev)
    ev["drop"] = reduced[bad] - reduced[bad - 1]
    return Verdict("slc", FAILS, h, witness=bad + 1, evidence=ev)


def _check_normalized(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    t0 = m.log_term(0)
    t1 = m.log_term(1)
    ev = {"log_term_0": t0, "log_term_1": t1}
    if abs(t0) > cfg.comparison_slack:
        return Verdict("normalized", FAILS, h, witness=0, evidence=ev)
    if t1 < t0 - cfg.comparison_slack:
        return Verdict("normalized", FAILS, h, witness=1, evidence=ev)
    return Verdict("normalized", HOLDS, h, evidence=ev)


# ---------------------------------------------------------------------------
# two-index growth conditions


def sample_pairs(h: int, count: int, seed: int) -> list[tuple[int, int]]:
    """Deterministic off-diagonal (j, k) sample with j + k <= horizon."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        n = rng.randint(2, max(2, h))
        j = rng.randint(1, n - 1)
        pairs.append((j, n - j))
    return pairs


def _check_mg(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    jmax = h // 2
    idx = list(range(1, jmax + 1))
    diag = [
        (m.log_term(2 * j) - 2.0 * m.log_term(j)) / (2 * j + 1)
        for j in idx
    ]
    off = [
        (m.log_term(j + k) - m.log_term(j) - m.log_term(k)) / (j + k + 1)
        for j, k in sample_pairs(h, cfg.offdiag_samples, cfg.seed)
    ]
    report = classify_trajectory(idx, diag, cfg)
    ev = {
        "diag_defect": decimate(diag),
        "offdiag_max": max(off) if off else None,
        "trajectory": report.summary(),
    }
    if report.trend == UP:
        ev["diverging"] = True
        return Verdict("mg", UNDETERMINED, h, evidence=ev)
    log_c = max(diag + off) if off else max(diag)
    ev["log_constant"] = log_c
    return Verdict("mg", HOLDS, h, evidence=ev)


def _check_dc(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    idx = list(range(1, h + 1))
    defect = [m.quotient_log(j) / j for j in idx]  # M_j <= A^j M_{j-1}
    report = classify_trajectory(idx, defect, cfg)
    ev = {"defect": decimate(defect), "trajectory": report.summary()}
    if report.trend == UP:
        ev["diverging"] = True
        return Verdict("dc", UNDETERMINED, h, evidence=ev)
    ev["log_constant"] = report.sup
    return Verdict("dc", HOLDS, h, evidence=ev)


# ---------------------------------------------------------------------------
# series/ratio conditions


def _check_nq_generic(tag, values_log, h, cfg):
    """values_log[i] = log of the positive sequence whose reciprocals are summed."""
    partial = log_sum([-v for v in values_log])
    q3 = (3 * len(values_log)) // 4
    tail_idx = range(q3 + 1, len(values_log) + 1)
    p, log_tail = _powerfit_tail(
        [math.log(j) for j in tail_idx],
        values_log[q3:],
        h,
        cfg.powerfit_margin,
    )
    ev = {"partial_sum_log": partial, "fitted_exponent": p}
    if log_tail is None:
        return Verdict(tag, UNDETERMINED, h, evidence=ev)
    ev["tail_bound_log"] = log_tail
    ev["total_log"] = log_add(partial, log_tail)
    return Verdict(tag, HOLDS, h, evidence=ev)


def _check_nq(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    return _check_nq_generic("nq", [m.quotient_log(j) for j in range(1, h + 1)], h, cfg)


def _check_nq_carleman(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    return _check_nq_generic("nq_carleman", [m.root_log(j) for j in range(1, h + 1)], h, cfg)


def _check_beta(tag: str, m: WeightSequence, h: int, cfg: Config, Q: int, floor_log: float) -> Verdict:
    lo = max(1, h // 2)
    vals = [m.quotient_log(Q * j) - m.quotient_log(j) for j in range(lo, h + 1)]
    tail_min = min(vals)
    ev = {"tail_min_log": tail_min, "required_log": floor_log, "Q": Q,
          "window": [lo, h]}
    if tail_min > floor_log:
        return Verdict(tag, HOLDS, h, evidence=ev)
    return Verdict(tag, UNDETERMINED, h, evidence=ev)


def _check_beta1(m: WeightSequence, h: int, cfg: Config, Q: int) -> Verdict:
    return _check_beta("beta1", m, h, cfg, Q, math.log(Q))


def _check_beta3(m: WeightSequence, h: int, cfg: Config, Q: int) -> Verdict:
    return _check_beta("beta3", m, h, cfg, Q, 0.0)


def _check_gamma1(m: WeightSequence, h: int, cfg: Config) -> Verdict:
    mu = [m.quotient_log(j) for j in range(1, h + 1)]  # mu[i] = log mu_{i+1}
    q3 = (3 * h) // 4
    p, log_tail = _powerfit_tail(
        [math.log(j) for j in range(q3 + 1, h + 1)], mu[q3:], h, cfg.powerfit_margin,
    )
    ev = {"fitted_exponent": p}
    if log_tail is None:
        # reciprocal tail beyond the horizon cannot be bounded
        return Verdict("gamma1", UNDETERMINED, h, evidence=ev)
    # suffix log-sums of 1/mu_k from j to horizon, then the tail bound
    suffix = [LOG_ZERO] * (h + 1)
    acc = LOG_ZERO
    for i in range(h - 1, -1, -1):
        acc = log_add(acc, -mu[i])
        suffix[i] = acc
    jmax = max(1, h // 2)
    traj = [
        (mu[j - 1] - math.log(j)) + log_add(suffix[j - 1], log_tail)
        for j in range(1, jmax + 1)
    ]
    stable, sup = running_sup_stabilized(traj, cfg)
    ev.update({
        "sup_log": sup,
        "stabilized": stable,
        "trajectory_log": decimate(traj),
        "tail_bound_log": log_tail,
    })
    if stable:
        return Verdict("gamma1", HOLDS, h, evidence=ev)
    return Verdict("gamma1", UNDETERMINED, h, evidence=ev)


_DISPATCH = {
    "lc": _check_lc,
    "slc": _check_slc,
    "normalized": _check_normalized,
    "mg": _check_mg,
    "dc": _check_dc,
    "nq": _check_nq,
    "nq_carleman": _check_nq_carleman,
    "beta1": _check_beta1,
    "beta3": _check_beta3,
    "gamma1": _check_gamma1,
}


# ---------------------------------------------------------------------------
# growth profiles


def root_growth_profile(m: WeightSequence, horizon: int | None = None,
                        cfg: Config | None = None) -> dict:
    """Tail estimates for quotient/root growth plus window-safe orderings.

    liminf/limsup estimates are min/max over the last quarter.  The
    sandwich flag reports the two orderings that are checkable inside a
    window: roots never exceed quotients pointwise (normalized log-convex
    inputs), and the tail max of the roots stays below the tail max of the
    quotients.  The divergence flag compares the last-quarter minimum of
    the roots against the first-quarter maximum plus cfg.root_margin.
    """
    cfg = cfg or Config()
    h = _need_horizon(horizon, cfg)
    mu = [m.quotient_log(j) for j in range(1, h + 1)]
    roots = [m.root_log(j) for j in range(1, h + 1)]
    q1 = max(1, h // 4)
    q3 = (3 * h) // 4
    tail_mu = mu[q3:]
    tail_roots = roots[q3:]
    pointwise_ok = all(r <= u + cfg.comparison_slack for r, u in zip(roots, mu))
    profile = {
        "horizon": h,
        "mu_liminf_log": min(tail_mu),
        "mu_limsup_log": max(tail_mu),
        "root_liminf_log": min(tail_roots),
        "root_limsup_log": max(tail_roots),
        "sandwich_ok": pointwise_ok and max(tail_roots) <= max(tail_mu) + cfg.comparison_slack,
        "root_first_quarter_max": max(roots[:q1]),
        "root_last_quarter_min": min(tail_roots),
        "margin": cfg.root_margin,
    }
    profile["divergent"] = (
        profile["root_last_quarter_min"] >= profile["root_first_quarter_max"] + cfg.root_margin
    )
    return profile


def gamma_lower_bound(m: WeightSequence, alphas, horizon: int | None = None,
                      cfg: Config | None = None) -> dict:
    """Certify growth-index lower bounds: for each alpha, Holds when
    j -> log mu_j - alpha log j is non-decreasing from an onset in the
    first half of the window and the alpha-divided roots are not decaying.

    Fails (with the last violating index) when the monotonicity defect
    persists into the last quarter; late onsets give Undetermined.
    """
    cfg = cfg or Config()
    h = _need_horizon(horizon, cfg)
    out = {}
    terms = [m.log_term(j) for j in range(h + 1)]
    mu = [terms[j] - terms[j - 1] for j in range(1, h + 1)]
    logs = [math.log(j) for j in range(1, h + 1)]
    slack = _scan_slack(cfg, terms)
    for alpha in alphas:
        a = float(alpha)
        vals = [u - a * lj for u, lj in zip(mu, logs)]
        last_violation = 0  # j-value of the last drop
        for i in range(len(vals) - 1, 0, -1):
            if vals[i] < vals[i - 1] - slack:
                last_violation = i + 1
                break
        onset = max(1, last_violation)
        divided_roots = [
            (m.log_term(j) - a * math.lgamma(j + 1)) / j for j in range(1, h + 1)
        ]
        q1 = max(1, h // 4)
        q3 = (3 * h) // 4
        first_max = max(divided_roots[:q1])
        tail_min = min(divided_roots[q3:])
        decayed = tail_min < first_max - math.log(10.0)
        ev = {
            "alpha": a,
            "onset": onset,
            "divided_root_tail_min": tail_min,
            "divided_root_first_max": first_max,
            "divided_root_divergent": tail_min >= first_max + cfg.root_margin,
        }
        subject = f"gamma_lb(alpha={a})"
        if last_violation > q3:
            out[a] = Verdict(subject, FAILS, h, witness=last_violation, evidence=ev)
        elif onset > h // 2:
            out[a] = Verdict(subject, UNDETERMINED, h, evidence=ev)
        elif decayed:
            ev["decaying_roots"] = True
            out[a] = Verdict(subject, UNDETERMINED, h, evidence=ev)
        else:
            out[a] = Verdict(subject, HOLDS, h, evidence=ev)
    return out


def exponent_growth_report(phi: ExponentSequence, horizon: int | None = None,
                           cfg: Config | None = None) -> dict:
    """Tail behaviour of phi_j / j: estimate of the liminf plus a decay flag.

    Quarterly minima that shrink steadily mark a gap vanishing at infinity
    even when the last value still sits above EXPONENT_GAP_FLOOR.
    """
    cfg = cfg or Config()
    h = _need_horizon(horizon, cfg)
    ratios = [phi.value(j) / j for j in range(1, h + 1)]
    quarter = max(1, h // 4)
    mins = [min(ratios[i * quarter: (i + 1) * quarter] or ratios[-1:]) for i in range(4)]
    shrink = 1.0 - cfg.stabilize_rel
    decaying = mins[3] <= mins[2] * shrink and mins[2] <= mins[1] * shrink
    tail = mins[3]
    return {
        "horizon": h,
        "tail_liminf": tail,
        "quarter_mins": mins,
        "decaying": decaying,
        "positive_gap": tail > EXPONENT_GAP_FLOOR and not decaying,
    }
