"""Lacunary witness series, seminorms on derivative-bound data, membership.

The witness series for a sequence N has term j equal to
N_j / (2^j nu_j^j) * exp(2 i nu_j t), nu_j the quotients with nu_0 := 1.
Log-convexity plus normalization force every modulus below 2^-j, so a
truncation at T carries a guaranteed tail below 2^-T and the k-th
derivative at 0 is a plain positive sum in log scale.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

from .config import Config
from .errors import InvalidParameterError, PreconditionError
from .logdomain import log_sum
from .sequences import ExponentSequence, WeightSequence, linear_exponents
from .verdicts import (
    FAILS,
    HOLDS,
    UNDETERMINED,
    UP,
    Verdict,
    classify_trajectory,
    running_sup_stabilized,
)
from . import conditions as _conditions
from .matrices import WeightMatrix

SOURCES = ("synthetic", "theta", "user")

# beyond this the linear-scale frequency overflows; the skipped moduli are
# below 2^-j and vanish against the 2^-truncation budget
_PHASE_EXP_LIMIT = 700.0

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class DerivBounds:
    """Log sup-norms of successive derivatives on a fixed compact set."""

    bounds: tuple
    label: str = ""
    source: str = "user"

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.bounds)
        if not vals:
            raise InvalidParameterError("bounds", "need at least one bound")
        for j, v in enumerate(vals):
            if not math.isfinite(v):
                raise InvalidParameterError(
                    "bounds", f"bound {j} is not finite: {v}")
        if self.source not in SOURCES:
            raise InvalidParameterError(
                "source", f"unknown source {self.source!r}; expected {SOURCES}")
        object.__setattr__(self, "bounds", vals)

    def top_index(self) -> int:
        return len(self.bounds) - 1

    def to_json(self) -> dict:
        return {"label": self.label, "source": self.source,
                "bounds": list(self.bounds)}


def synthetic_bounds(m: WeightSequence, count: int, label: str | None = None) -> DerivBounds:
    """Bounds that saturate a sequence exactly: bound_j = log M_j."""
    if count < 0:
        raise InvalidParameterError("count", f"need count >= 0, got {count}")
    return DerivBounds(tuple(m.log_term(j) for j in range(count + 1)),
                       label=label or f"synthetic({m.label()})",
                       source="synthetic")


def load_bounds_csv(path: str, label: str | None = None) -> DerivBounds:
    """Columns j, log_bound; rows may arrive unordered but must cover 0..J."""
    table: dict[int, float] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or ()
        if "j" not in names or "log_bound" not in names:
            raise InvalidParameterError(
                "path", f"need columns j, log_bound in {path}, got {list(names)}")
        for row in reader:
            jv, bv = row.get("j"), row.get("log_bound")
            if jv is None or bv is None:
                raise InvalidParameterError("path", f"short row in {path}")
            table[int(jv)] = float(bv)
    if not table:
        raise InvalidParameterError("path", f"no rows in {path}")
    top = max(table)
    missing = [j for j in range(top + 1) if j not in table]
    if missing:
        raise InvalidParameterError(
            "path", f"missing derivative orders {missing[:5]} in {path}")
    return DerivBounds(tuple(table[j] for j in range(top + 1)),
                       label=label or path, source="user")


def load_bounds_json(path: str) -> DerivBounds:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        data = {"bounds": data}
    return DerivBounds(tuple(float(v) for v in data["bounds"]),
                       label=data.get("label", path),
                       source=data.get("source", "user"))


# ---------------------------------------------------------------------------
# witness series


def _require_witness_preconditions(n: WeightSequence, truncation: int,
                                   cfg: Config) -> None:
    for tag in ("lc", "normalized"):
        v = _conditions.check_condition(n, tag, truncation, cfg)
        if not v.holds:
            raise PreconditionError(
                f"witness series needs {tag} to hold on {n.label()} "
                f"up to {truncation}; got {v.status}", witness=v.witness)


def _freq_log(n: WeightSequence, j: int, shift_quotients: bool) -> float:
    # nu_0 := 1; the optional shift replaces nu_j by nu_{j+1}
    if j == 0 and not shift_quotients:
        return 0.0
    return n.quotient_log(j + 1 if shift_quotients else j)


def theta_eval(n: WeightSequence, t: float, truncation: int,
               cfg: Config | None = None,
               shift_quotients: bool = False) -> tuple[float, float]:
    """Truncated witness series value; tail error below 2^-truncation."""
    cfg = cfg or Config()
    if truncation < 1:
        raise InvalidParameterError("truncation", f"need >= 1, got {truncation}")
    t = float(t)
    if not math.isfinite(t):
        raise InvalidParameterError("t", f"need finite t, got {t}")
    _require_witness_preconditions(n, truncation, cfg)
    log_2t = math.log(2.0 * abs(t)) if t != 0.0 else None
    re_parts, im_parts = [], []
    for j in range(truncation + 1):
        freq = _freq_log(n, j, shift_quotients)
        mag = math.exp(n.log_term(j) - j * (_LN2 + freq))
        if t == 0.0:
            re_parts.append(mag)
            im_parts.append(0.0)
            continue
        if freq + log_2t > _PHASE_EXP_LIMIT:
            continue
        phase = 2.0 * math.exp(freq) * t
        re_parts.append(mag * math.cos(phase))
        im_parts.append(mag * math.sin(phase))
    return math.fsum(re_parts), math.fsum(im_parts)


def theta_derivative_log_bound(n: WeightSequence, k: int,
                               truncation: int | None = None,
                               cfg: Config | None = None,
                               shift_quotients: bool = False) -> float:
    """log |theta^(k)(0)|: every term shares the phase i^k, so the modulus
    is the log-sum over j of log N_j + (k-j)(ln 2 + log nu_j)."""
    cfg = cfg or Config()
    if k < 0:
        raise InvalidParameterError("k", f"need k >= 0, got {k}")
    if truncation is None:
        truncation = k + 50
    if truncation < k + 10:
        raise InvalidParameterError(
            "truncation", f"need truncation >= k + 10 = {k + 10}, got {truncation}")
    _require_witness_preconditions(n, truncation, cfg)
    terms = []
    for j in range(truncation + 1):
        freq = _freq_log(n, j, shift_quotients)
        terms.append(n.log_term(j) + (k - j) * (_LN2 + freq))
    return log_sum(terms)


def theta_bounds(n: WeightSequence, count: int, truncation: int | None = None,
                 cfg: Config | None = None) -> DerivBounds:
    """Derivative-bound data of the witness series of n at 0."""
    vals = tuple(theta_derivative_log_bound(n, k, truncation, cfg)
                 for k in range(count + 1))
    return DerivBounds(vals, label=f"theta({n.label()})", source="theta")


# ---------------------------------------------------------------------------
# seminorms and membership


def seminorm_trajectory(f: DerivBounds, m: WeightSequence,
                        phi: ExponentSequence, h: float) -> list[float]:
    if not (h > 0.0 and math.isfinite(h)):
        raise InvalidParameterError("h", f"need h > 0, got {h}")
    ln_h = math.log(h)
    top = f.top_index()
    if m.max_index() is not None:
        top = min(top, m.max_index())
    return [f.bounds[j] - phi.value(j) * ln_h - m.log_term(j)
            for j in range(top + 1)]


def seminorm(f: DerivBounds, m: WeightSequence, phi: ExponentSequence | None,
             h: float) -> float:
    """sup_j of bound_j - Phi_j log h - log M_j over the available orders."""
    phi = phi or linear_exponents()
    return max(seminorm_trajectory(f, m, phi, h))


@dataclass(frozen=True)
class MembershipReport:
    subject: str
    roumieu: Verdict
    beurling: Verdict
    table: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        cells = [{"c": c, "h": h, **cell} for (c, h), cell in
                 sorted(self.table.items())]
        return {"subject": self.subject,
                "roumieu": self.roumieu.to_json(),
                "beurling": self.beurling.to_json(),
                "table": cells}


DEFAULT_H_GRID = (0.5, 1.0, 2.0, 4.0)


def classify_membership(f: DerivBounds, mm: WeightMatrix,
                        phi: ExponentSequence | None = None,
                        index_grid=None, h_grid=DEFAULT_H_GRID,
                        cfg: Config | None = None) -> MembershipReport:
    """Seminorm stabilization over a (c, h) grid.

    Roumieu membership needs one stabilized cell anywhere; Beurling needs
    every h to stabilize at the smallest index, since shrinking the index
    only tightens the Beurling class.
    """
    cfg = cfg or Config()
    phi = phi or (mm.phi if mm.phi is not None else linear_exponents())
    grid = tuple(float(c) for c in index_grid) if index_grid is not None \
        else mm.index_grid
    hs = tuple(float(h) for h in h_grid)
    if not grid or not hs:
        raise InvalidParameterError("grid", "index and h grids must be nonempty")
    if any(h <= 0 for h in hs):
        raise InvalidParameterError("h_grid", f"need positive h, got {hs}")

    table: dict[tuple[float, float], dict] = {}
    for c in grid:
        elem = mm.element(c)
        for h in hs:
            vals = seminorm_trajectory(f, elem, phi, h)
            stab, sup = running_sup_stabilized(vals, cfg)
            cell = {"sup": sup, "stabilized": stab}
            if len(vals) >= 3:
                rep = classify_trajectory(range(1, len(vals) + 1), vals, cfg)
                cell["trend"] = rep.trend
            table[(c, h)] = cell

    subject = f"membership({f.label or f.source}, {mm.label()})"
    horizon = f.top_index()

    r_witness = next(((c, h) for c in grid for h in hs
                      if table[(c, h)]["stabilized"]), None)
    if r_witness is not None:
        r = Verdict(subject + ":roumieu", HOLDS, horizon, witness=r_witness,
                    evidence={"sup": table[r_witness]["sup"]})
    elif all(cell.get("trend") == UP for cell in table.values()):
        r = Verdict(subject + ":roumieu", FAILS, horizon,
                    evidence={"diverging": True})
    else:
        r = Verdict(subject + ":roumieu", UNDETERMINED, horizon)

    c0 = min(grid)
    b_cells = {h: table[(c0, h)] for h in hs}
    b_bad = next((h for h in hs if b_cells[h].get("trend") == UP
                  and not b_cells[h]["stabilized"]), None)
    if all(cell["stabilized"] for cell in b_cells.values()):
        b = Verdict(subject + ":beurling", HOLDS, horizon, witness=c0,
                    evidence={"sup": max(cell["sup"] for cell in b_cells.values())})
    elif b_bad is not None:
        b = Verdict(subject + ":beurling", FAILS, horizon, witness=(c0, b_bad),
                    evidence={"diverging": True})
    else:
        b = Verdict(subject + ":beurling", UNDETERMINED, horizon, witness=c0)

    return MembershipReport(subject, r, b, table)
