"""Pairwise comparison relations between weight sequences.

The root-scale comparisons work on r_j = (log M_j - log N_j) / j (or an
exponent-sequence denominator phi_j).  Domination (preceq) asks whether the
running sup of r stabilizes; strict smallness (triangle) asks whether r
sinks without return.  Pointwise relations are exact per-index checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import Config
from .errors import InvalidParameterError
from .sequences import ExponentSequence, WeightSequence
from .verdicts import (
    FAILS,
    HOLDS,
    UNDETERMINED,
    UP,
    Verdict,
    classify_trajectory,
    decimate,
    running_sup_stabilized,
)

RELATIONS = ("preceq", "approx", "triangle", "pointwise_le", "quotient_le")

# tolerance for the constant-ratio fast path of scaled families
RATIO_TOL = 1e-9


@dataclass(frozen=True)
class RelationId:
    tag: str
    phi: ExponentSequence | None = None

    def label(self) -> str:
        return self.tag if self.phi is None else f"{self.tag}[phi={self.phi.label()}]"


def _ratio_trajectory(m, n, h, phi):
    """Indices and r values; phi_j = 0 indices are excluded and reported."""
    idx, vals, excluded = [], [], []
    for j in range(1, h + 1):
        denom = float(j) if phi is None else phi.value(j)
        if denom == 0.0:
            excluded.append(j)
            continue
        idx.append(j)
        vals.append((m.log_term(j) - n.log_term(j)) / denom)
    if not idx:
        raise InvalidParameterError("phi", "all indices excluded (phi vanishes on the window)")
    return idx, vals, excluded


def _preceq(m, n, h, cfg, phi) -> Verdict:
    idx, vals, excluded = _ratio_trajectory(m, n, h, phi)
    report = classify_trajectory(idx, vals, cfg)
    stable, sup = running_sup_stabilized(vals, cfg)
    ev = {
        "ratio_log": decimate(vals),
        "trajectory": report.summary(),
        "sup": sup,
        "sup_stabilized": stable,
    }
    if excluded:
        ev["excluded_indices"] = decimate(excluded)
    if report.trend == UP:
        return Verdict("preceq", FAILS, h, witness=idx[report.sup_index], evidence=ev)
    if stable:
        return Verdict("preceq", HOLDS, h, evidence=ev)
    return Verdict("preceq", UNDETERMINED, h, evidence=ev)


def _triangle(m, n, h, cfg, phi) -> Verdict:
    idx, vals, excluded = _ratio_trajectory(m, n, h, phi)
    report = classify_trajectory(idx, vals, cfg)
    q3 = (3 * len(vals)) // 4
    tail = vals[q3:]
    ev = {"ratio_log": decimate(vals), "trajectory": report.summary()}
    if excluded:
        ev["excluded_indices"] = decimate(excluded)
    sinking = report.slope < -cfg.log_slope_tol
    if sinking and max(tail) < 0.0:
        return Verdict("triangle", HOLDS, h, evidence=ev)
    if min(tail) > 0.0 and not sinking:
        # bounded away from zero: the root ratio is not sinking
        pos = q3 + tail.index(min(tail))
        return Verdict("triangle", FAILS, h, witness=idx[pos], evidence=ev)
    return Verdict("triangle", UNDETERMINED, h, evidence=ev)


def _pointwise(m, n, h, cfg, quotients: bool) -> Verdict:
    tag = "quotient_le" if quotients else "pointwise_le"
    lo = 1 if quotients else 0
    for j in range(lo, h + 1):
        a = m.quotient_log(j) if quotients else m.log_term(j)
        b = n.quotient_log(j) if quotients else n.log_term(j)
        if a > b + cfg.comparison_slack * max(1.0, abs(a), abs(b)):
            return Verdict(tag, FAILS, h, witness=j, evidence={"gap_log": a - b})
    return Verdict(tag, HOLDS, h)


def compare(
    m: WeightSequence,
    n: WeightSequence,
    rel: str | RelationId,
    horizon: int | None = None,
    cfg: Config | None = None,
    phi: ExponentSequence | None = None,
) -> Verdict:
    cfg = cfg or Config()
    if isinstance(rel, RelationId):
        tag = rel.tag
        phi = rel.phi if rel.phi is not None else phi
    else:
        tag = rel
    if tag not in RELATIONS:
        raise InvalidParameterError("rel", f"unknown relation {tag!r}; expected one of {RELATIONS}")
    h = cfg.horizon if horizon is None else int(horizon)
    if h < 4:
        raise InvalidParameterError("horizon", f"need horizon >= 4, got {h}")
    if tag in ("pointwise_le", "quotient_le"):
        if phi is not None:
            raise InvalidParameterError("phi", f"{tag} takes no exponent sequence")
        v = _pointwise(m, n, h, cfg, tag == "quotient_le")
    elif tag == "preceq":
        v = _preceq(m, n, h, cfg, phi)
    elif tag == "triangle":
        v = _triangle(m, n, h, cfg, phi)
    else:  # approx
        fwd = _preceq(m, n, h, cfg, phi)
        bwd = _preceq(n, m, h, cfg, phi)
        ev = {"forward": fwd.to_json(), "backward": bwd.to_json()}
        if fwd.holds and bwd.holds:
            v = Verdict("approx", HOLDS, h, evidence=ev)
        elif fwd.fails or bwd.fails:
            w = fwd.witness if fwd.fails else bwd.witness
            v = Verdict("approx", FAILS, h, witness=w, evidence=ev)
        else:
            v = Verdict("approx", UNDETERMINED, h, evidence=ev)
    v.evidence["left"] = m.label()
    v.evidence["right"] = n.label()
    if phi is not None:
        v.subject = f"{tag}[phi={phi.label()}]"
        v.evidence["phi"] = phi.label()
    return v


def compare_phi_constancy(
    seqs: list[WeightSequence],
    phi: ExponentSequence,
    horizon: int | None = None,
    cfg: Config | None = None,
) -> Verdict:
    """All-pairs equivalence in the phi-weighted root scale.

    Elements of one exponent-scaled family admit an exact check: their
    term ratio per phi-unit must equal log(c1) - log(c2) to RATIO_TOL.
    Other pairs fall back to the two-sided stabilization comparison.
    """
    cfg = cfg or Config()
    h = cfg.horizon if horizon is None else int(horizon)
    if len(seqs) < 2:
        raise InvalidParameterError("seqs", "need at least two sequences")
    pair_reports = []
    status = HOLDS
    witness = None
    for a in range(len(seqs)):
        for b in range(a + 1, len(seqs)):
            m, n = seqs[a], seqs[b]
            same_family = (
                m.family == "scaled" and n.family == "scaled"
                and m.params.get("base") == n.params.get("base")
                and m.params.get("phi") == n.params.get("phi")
            )
            if same_family:
                expected = math.log(m.params["c"]) - math.log(n.params["c"])
                dev = 0.0
                for j in range(1, h + 1):
                    p = phi.value(j)
                    if p == 0.0:
                        continue
                    dev = max(dev, abs((m.log_term(j) - n.log_term(j)) / p - expected))
                ok = dev <= RATIO_TOL
                pair_reports.append({
                    "pair": [m.label(), n.label()],
                    "mode": "exact_ratio",
                    "expected_log_ratio": expected,
                    "max_deviation": dev,
                    "status": HOLDS if ok else FAILS,
                })
                if not ok and status != FAILS:
                    status = FAILS
                    witness = [m.label(), n.label()]
            else:
                v = compare(m, n, "approx", h, cfg, phi=phi)
                pair_reports.append({
                    "pair": [m.label(), n.label()],
                    "mode": "approx",
                    "status": v.status,
                })
                if v.fails and status != FAILS:
                    status = FAILS
                    witness = v.witness
                elif v.status == UNDETERMINED and status == HOLDS:
                    status = UNDETERMINED
    return Verdict(
        "phi_constancy", status, h, witness=witness,
        evidence={"pairs": pair_reports, "phi": phi.label()},
    )
