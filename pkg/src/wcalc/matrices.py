"""One-parameter families of weight sequences and their order-level checks.

A matrix is a map c -> weight sequence that is pointwise non-decreasing in
c.  The universally/existentially quantified matrix conditions are rendered
finitely: for each grid index alpha a partner beta is searched upward
(Roumieu) or downward (Beurling) through the grid, then geometrically
beyond it for a few steps, and the first partner whose defect trajectory
stabilizes is reported together with the constant it certifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .config import Config
from .errors import (
    HorizonError,
    InvalidParameterError,
    OrderViolationError,
)
from .sequences import (
    ExponentFamily,
    ExponentSequence,
    WeightSequence,
    power_exponents,
    ptt,
    scaled,
)
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
from . import conditions as _conditions
from . import relations as _relations

ROUMIEU = "roumieu"
BEURLING = "beurling"

MATRIX_CONDITIONS = ("L", "mg", "dc", "rai", "FdB", "BR", "sc", "constant")

# default index grid: geometric from 2^-4 to 2^8
DEFAULT_INDEX_GRID = tuple(2.0 ** k for k in range(-4, 9))

_ORDER_CHECK_HORIZON = 64


@dataclass(frozen=True)
class MatrixConditionId:
    tag: str
    flavor: str = ROUMIEU

    def __post_init__(self) -> None:
        if self.tag not in MATRIX_CONDITIONS:
            raise InvalidParameterError(
                "tag", f"unknown matrix condition {self.tag!r}; "
                f"expected one of {MATRIX_CONDITIONS}")
        if self.flavor not in (ROUMIEU, BEURLING):
            raise InvalidParameterError(
                "flavor", f"unknown flavor {self.flavor!r}")


def condition_id(tag: str, flavor: str = ROUMIEU) -> MatrixConditionId:
    """Normalize user spellings like 'fdb'/'br'/'r'/'b'."""
    canon = {c.lower(): c for c in MATRIX_CONDITIONS}
    t = canon.get(tag.lower())
    if t is None:
        raise InvalidParameterError("tag", f"unknown matrix condition {tag!r}")
    f = {"r": ROUMIEU, "roumieu": ROUMIEU, "b": BEURLING, "beurling": BEURLING}.get(
        flavor.lower())
    if f is None:
        raise InvalidParameterError("flavor", f"unknown flavor {flavor!r}")
    return MatrixConditionId(t, f)


class WeightMatrix:
    def __init__(self, construction: str, params: dict,
                 element_fn: Callable[[float], WeightSequence],
                 index_grid, phi: ExponentSequence | None = None,
                 diagnostics: dict | None = None) -> None:
        grid = tuple(float(c) for c in index_grid)
        if len(grid) < 1:
            raise InvalidParameterError("index_grid", "empty index grid")
        if any(not (c > 0.0 and math.isfinite(c)) for c in grid):
            raise InvalidParameterError("index_grid", f"indices must be positive: {grid}")
        if list(grid) != sorted(grid):
            raise InvalidParameterError("index_grid", "index grid must be ascending")
        self.construction = construction
        self.params = params
        self.index_grid = grid
        self._fn = element_fn
        self._phi = phi
        self._memo: dict[float, WeightSequence] = {}
        self.diagnostics = diagnostics or {}

    def element(self, c: float) -> WeightSequence:
        c = float(c)
        if not (c > 0.0 and math.isfinite(c)):
            raise InvalidParameterError("c", f"need c > 0, got {c}")
        got = self._memo.get(c)
        if got is None:
            got = self._fn(c)
            self._memo[c] = got
        return got

    @property
    def phi(self) -> ExponentSequence | None:
        return self._phi

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())
                          if not k.startswith("_"))
        return f"{self.construction}({inner})"

    def to_json(self) -> dict:
        return {"construction": self.construction,
                "params": {k: v for k, v in self.params.items()
                           if not k.startswith("_")},
                "index_grid": list(self.index_grid)}


def _order_slack(a: float, b: float) -> float:
    return 1e-9 * max(1.0, abs(a), abs(b))


def _validate_order(mm: WeightMatrix, horizon: int = _ORDER_CHECK_HORIZON) -> None:
    grid = mm.index_grid
    for a, b in zip(grid, grid[1:]):
        ea, eb = mm.element(a), mm.element(b)
        top = horizon
        for seq in (ea, eb):
            if seq.max_index() is not None:
                top = min(top, seq.max_index())
        for j in range(top + 1):
            ta, tb = ea.log_term(j), eb.log_term(j)
            if ta > tb + _order_slack(ta, tb):
                raise OrderViolationError(
                    f"matrix {mm.label()} not pointwise ordered",
                    witness=(a, b, j))


def _phi_diagnostics(phi: ExponentSequence, horizon: int = _ORDER_CHECK_HORIZON) -> dict:
    vals = [phi.value(j) for j in range(horizon + 2)]
    convex = all(2.0 * vals[j] <= vals[j - 1] + vals[j + 1] + 1e-9
                 for j in range(1, horizon + 1))
    ratios = [vals[j] / j for j in range(1, horizon + 1)]
    ratio_monotone = all(ratios[i] <= ratios[i + 1] + 1e-9
                         for i in range(len(ratios) - 1))
    return {"phi_convex": convex, "phi_ratio_monotone": ratio_monotone}


def scale_family(base: WeightSequence, phi: ExponentSequence,
                 index_grid=DEFAULT_INDEX_GRID) -> WeightMatrix:
    """Elements c -> base rescaled by c^(phi_j)."""
    mm = WeightMatrix(
        "scale_family",
        {"base": base.label(), "phi": phi.label(), "_base": base, "_phi": phi},
        lambda c: scaled(base, phi, c),
        index_grid, phi=phi, diagnostics=_phi_diagnostics(phi))
    _validate_order(mm)
    return mm


def ptt_matrix(tau: float, sigma: float,
               index_grid=DEFAULT_INDEX_GRID) -> WeightMatrix:
    """Elements c -> c^(j^sigma) * j^(tau j^sigma)."""
    base = ptt(tau, sigma)
    phi = power_exponents(sigma)
    mm = WeightMatrix(
        "ptt_matrix", {"tau": float(tau), "sigma": float(sigma)},
        lambda c: scaled(base, phi, c),
        index_grid, phi=phi, diagnostics=_phi_diagnostics(phi))
    _validate_order(mm)
    return mm


def sigma_matrix(sigma: float, index_grid=DEFAULT_INDEX_GRID) -> WeightMatrix:
    """Elements tau -> tau^(j^sigma) * j^(tau j^sigma): the index feeds both
    the geometric factor and the growth exponent."""
    sigma = float(sigma)
    if not (sigma >= 1.0 and math.isfinite(sigma)):
        raise InvalidParameterError("sigma", f"need sigma >= 1, got {sigma}")

    def make(tau: float) -> WeightSequence:
        lt = math.log(tau)

        def term(j: int) -> float:
            if j == 0:
                return 0.0
            p = float(j) ** sigma
            return p * lt + tau * p * math.log(j)

        return WeightSequence(
            "sigma_element", {"tau": tau, "sigma": sigma}, term)

    mm = WeightMatrix("sigma_matrix", {"sigma": sigma}, make, index_grid)
    _validate_order(mm)
    return mm


def matrix_scale(base: WeightMatrix, phi: ExponentSequence,
                 index_grid=None) -> WeightMatrix:
    """Elements c -> c^(phi_j) * N^(c)_j for a base matrix N."""
    grid = tuple(index_grid) if index_grid is not None else base.index_grid
    mm = WeightMatrix(
        "matrix_scale",
        {"base": base.label(), "phi": phi.label(), "_base": base, "_phi": phi},
        lambda c: scaled(base.element(c), phi, c),
        grid, phi=phi, diagnostics=_phi_diagnostics(phi))
    _validate_order(mm)
    return mm


def exponent_family_scale(base: WeightSequence, family: ExponentFamily,
                          index_grid=DEFAULT_INDEX_GRID) -> WeightMatrix:
    """Elements c -> c^(Phi^c_j) * M_j with a per-index exponent sequence.

    Requires the signed products Phi^a_j log(a) <= Phi^b_j log(b) on the
    grid; log(a) changes sign at 1, so no absolute values anywhere.
    """
    grid = tuple(float(c) for c in index_grid)
    for a, b in zip(grid, grid[1:]):
        pa, pb = family.sequence(a), family.sequence(b)
        la, lb = math.log(a), math.log(b)
        for j in range(_ORDER_CHECK_HORIZON + 1):
            va, vb = pa.value(j) * la, pb.value(j) * lb
            if va > vb + _order_slack(va, vb):
                raise OrderViolationError(
                    "exponent family breaks the signed ordering "
                    f"Phi^a_j log a <= Phi^b_j log b at (a={a}, b={b}, j={j})",
                    witness=(a, b, j))
    mm = WeightMatrix(
        "exponent_family_scale",
        {"base": base.label(), "family": family.label(),
         "_base": base, "_family": family},
        lambda c: scaled(base, family.sequence(c), c),
        grid)
    _validate_order(mm)
    return mm


def generic_matrix(pairs) -> WeightMatrix:
    """Explicit (index, sequence) list; rejects order violations."""
    items = sorted(((float(c), s) for c, s in pairs), key=lambda cs: cs[0])
    if not items:
        raise InvalidParameterError("pairs", "empty matrix")
    table = {c: s for c, s in items}
    if len(table) != len(items):
        raise InvalidParameterError("pairs", "duplicate indices")

    def fn(c: float) -> WeightSequence:
        got = table.get(float(c))
        if got is None:
            raise InvalidParameterError(
                "c", f"index {c} not in generic matrix grid {sorted(table)}")
        return got

    mm = WeightMatrix("generic", {"indices": [c for c, _ in items]}, fn,
                      [c for c, _ in items])
    _validate_order(mm)
    return mm


def matrix_term(mm: WeightMatrix, c: float, j: int) -> float:
    return mm.element(c).log_term(j)


# ---------------------------------------------------------------------------
# condition checking


def _beta_candidates(grid, alpha: float, flavor: str, steps: int):
    """(beta, beyond_grid) candidates: grid points on the search side of
    alpha, then a geometric continuation past the grid edge."""
    out: list[tuple[float, bool]] = []
    if flavor == ROUMIEU:
        for b in grid:
            if b >= alpha:
                out.append((b, False))
        ratio = grid[-1] / grid[-2] if len(grid) >= 2 else 2.0
        edge = grid[-1]
        for i in range(1, steps + 1):
            out.append((edge * ratio ** i, True))
    else:
        for b in reversed(grid):
            if b <= alpha:
                out.append((b, False))
        ratio = grid[1] / grid[0] if len(grid) >= 2 else 2.0
        edge = grid[0]
        for i in range(1, steps + 1):
            out.append((edge / ratio ** i, True))
    return out


def _sides(mm: WeightMatrix, alpha: float, beta: float, flavor: str):
    """(absorbed, absorbing) elements: the Roumieu partner sits above alpha
    on the right-hand side, the Beurling partner below it on the left."""
    if flavor == ROUMIEU:
        return mm.element(alpha), mm.element(beta)
    return mm.element(beta), mm.element(alpha)


def _trajectory_entry(indices, values, cfg: Config) -> dict:
    stab, sup = running_sup_stabilized(values, cfg)
    entry = {"stabilized": stab, "log_constant": sup,
             "defects": decimate(values)}
    if len(values) >= 3:
        rep = classify_trajectory(indices, values, cfg)
        entry["trend"] = rep.trend
        entry["slope"] = rep.slope
    return entry


def _mg_points(h: int, cfg: Config):
    pts = [(j, j) for j in range(1, h // 2 + 1)]
    pts.extend(_conditions.sample_pairs(h, cfg.offdiag_samples, cfg.seed))
    pts.sort(key=lambda jk: (jk[0] + jk[1], jk[0]))
    return pts


def _test_mg(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    pts = _mg_points(h, cfg)
    vals, idx = [], []
    for j, k in pts:
        d = (left.log_term(j + k) - right.log_term(j) - right.log_term(k)) / (j + k + 1)
        vals.append(d)
        idx.append(j + k)
    return _trajectory_entry(idx, vals, cfg)


def _test_dc(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    vals = [(left.log_term(j + 1) - right.log_term(j)) / (j + 1) for j in range(h)]
    return _trajectory_entry(list(range(1, h + 1)), vals, cfg)


def _test_l(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    per_c = {}
    ok = True
    worst = None
    for cconst in cfg.l_constants:
        lc = math.log(cconst)
        vals = [j * lc + left.log_term(j) - right.log_term(j) for j in range(h + 1)]
        entry = _trajectory_entry(list(range(1, h + 1)), vals[1:], cfg)
        per_c[cconst] = entry
        ok = ok and entry["stabilized"]
        if worst is None or entry["log_constant"] > worst:
            worst = entry["log_constant"]
    return {"stabilized": ok, "log_constant": worst, "per_factor": per_c,
            "trend": max((e.get("trend", "") for e in per_c.values()),
                         key=lambda t: t == UP)}


def _test_rai(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    roots_r = [right.root_log(k) for k in range(1, h + 1)]
    suffmin = roots_r[:]
    for i in range(len(suffmin) - 2, -1, -1):
        suffmin[i] = min(suffmin[i], suffmin[i + 1])
    vals = [left.root_log(j) - suffmin[j - 1] for j in range(1, h + 1)]
    return _trajectory_entry(list(range(1, h + 1)), vals, cfg)


def _test_fdb(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    k_top = min(h, cfg.fdb_horizon)
    reduced = [left.reduced_log(j) for j in range(k_top + 1)]
    comp = composition_sequence(reduced, k_top)
    vals = [(comp[k] - right.reduced_log(k)) / k for k in range(1, k_top + 1)]
    entry = _trajectory_entry(list(range(1, k_top + 1)), vals, cfg)
    entry["k_top"] = k_top
    return entry


def _test_br(left: WeightSequence, right: WeightSequence, h: int, cfg: Config) -> dict:
    v = _relations.compare(left, right, "triangle", h, cfg)
    return {"stabilized": v.holds, "log_constant": None,
            "trend": v.evidence.get("trend"), "relation_status": v.status}


_PAIR_TESTS = {
    "mg": _test_mg,
    "dc": _test_dc,
    "L": _test_l,
    "rai": _test_rai,
    "FdB": _test_fdb,
    "BR": _test_br,
}


def _check_sc_element(m: WeightSequence, h: int, cfg: Config, subject: str) -> Verdict:
    lc = _conditions.check_condition(m, "lc", h, cfg)
    nm = _conditions.check_condition(m, "normalized", h, cfg)
    profile = _conditions.root_growth_profile(m, h, cfg)
    ev = {"lc": lc.status, "normalized": nm.status,
          "roots_divergent": profile["divergent"]}
    if lc.status == FAILS or nm.status == FAILS:
        return Verdict(subject, FAILS, h,
                       witness=lc.witness if lc.status == FAILS else nm.witness,
                       evidence=ev)
    if lc.holds and nm.holds and profile["divergent"]:
        return Verdict(subject, HOLDS, h, evidence=ev)
    return Verdict(subject, UNDETERMINED, h, evidence=ev)


def check_matrix_condition(mm: WeightMatrix, cond: MatrixConditionId,
                           index_grid=None, horizon: int | None = None,
                           cfg: Config | None = None) -> dict:
    """Per-grid-index verdicts for a matrix-level condition."""
    cfg = cfg or Config()
    h = horizon if horizon is not None else cfg.horizon
    if h < 16:
        raise HorizonError(f"need horizon >= 16, got {h}")
    grid = tuple(float(c) for c in index_grid) if index_grid is not None \
        else mm.index_grid
    if cond.tag not in ("sc", "constant") and len(grid) < 3:
        raise InvalidParameterError("index_grid",
                                    f"need at least 3 indices, got {len(grid)}")

    out: dict[float, Verdict] = {}
    for alpha in grid:
        subject = f"{mm.label()}:{cond.tag}-{cond.flavor}@{alpha:g}"
        if cond.tag == "sc":
            out[alpha] = _check_sc_element(mm.element(alpha), h, cfg, subject)
            continue
        if cond.tag == "constant":
            anchor = grid[0]
            v = _relations.compare(mm.element(alpha), mm.element(anchor),
                                   "approx", h, cfg)
            ev = {"partner": anchor, "left": v.evidence.get("left"),
                  "right": v.evidence.get("right")}
            out[alpha] = Verdict(subject, v.status, h, witness=v.witness,
                                 evidence=ev)
            continue

        test = _PAIR_TESTS[cond.tag]
        found = None
        best = None
        all_up = True
        for beta, beyond in _beta_candidates(grid, alpha, cond.flavor,
                                             cfg.continuation_steps):
            left, right = _sides(mm, alpha, beta, cond.flavor)
            entry = test(left, right, h, cfg)
            if entry.get("trend") != UP:
                all_up = False
            if entry["stabilized"]:
                found = (beta, beyond, entry)
                break
            sup = entry.get("log_constant")
            if best is None or (sup is not None and best[2].get("log_constant")
                                is not None and sup < best[2]["log_constant"]):
                best = (beta, beyond, entry)
        if found is not None:
            beta, beyond, entry = found
            ev = {"alpha": alpha, "beta": beta, "beyond_grid": beyond,
                  "flavor": cond.flavor, "condition": cond.tag}
            ev.update(entry)
            if mm.phi is not None and cond.tag == "L":
                ev["exponent_growth"] = _conditions.exponent_growth_report(
                    mm.phi, h, cfg)
            out[alpha] = Verdict(subject, HOLDS, h, witness=beta, evidence=ev)
        else:
            ev = {"alpha": alpha, "flavor": cond.flavor, "condition": cond.tag,
                  "diverging": all_up}
            if best is not None:
                ev["best_beta"] = best[0]
                ev["best"] = best[2]
            if mm.phi is not None and cond.tag == "L":
                ev["exponent_growth"] = _conditions.exponent_growth_report(
                    mm.phi, h, cfg)
            out[alpha] = Verdict(subject, UNDETERMINED, h, evidence=ev)
    return out


def matrix_report_json(cond: MatrixConditionId, results: dict) -> dict:
    per_index = []
    for alpha in sorted(results):
        v = results[alpha]
        per_index.append({
            "alpha": alpha,
            "status": v.status,
            "beta": v.evidence.get("beta"),
            "constant": v.evidence.get("log_constant"),
            "evidence": v.to_json()["evidence"],
        })
    return {"condition": cond.tag, "flavor": cond.flavor, "per_index": per_index}


# ---------------------------------------------------------------------------
# composition sequence (partition maximum)


def composition_sequence(m, K: int, cfg: Config | None = None) -> list[float]:
    """Partition-maximum transform of a reduced sequence.

    Entry k is the max over all partitions k = j_1 + ... + j_l (parts >= 1)
    of log m_l + log m_{j_1} + ... + log m_{j_l}; entry 0 is log 1 = 0.
    Dynamic program over (remaining sum, parts used), O(K^3).

    m may be a WeightSequence whose log_term IS the reduced sequence, or a
    plain list of log values of length >= K+1.
    """
    if K < 0:
        raise InvalidParameterError("K", f"need K >= 0, got {K}")
    if isinstance(m, WeightSequence):
        logs = [m.log_term(j) for j in range(K + 1)]
    else:
        logs = [float(v) for v in m]
        if len(logs) < K + 1:
            raise InvalidParameterError(
                "m", f"need {K + 1} reduced terms, got {len(logs)}")
    neg = float("-inf")
    # best[k][l]: max sum of logs over l parts summing to k
    best = [[neg] * (K + 1) for _ in range(K + 1)]
    best[0][0] = 0.0
    for k in range(1, K + 1):
        for parts in range(1, k + 1):
            b = neg
            for j in range(1, k - parts + 2):
                prev = best[k - j][parts - 1]
                if prev != neg:
                    cand = logs[j] + prev
                    if cand > b:
                        b = cand
            best[k][parts] = b
    out = [0.0]
    for k in range(1, K + 1):
        out.append(max(logs[parts] + best[k][parts]
                       for parts in range(1, k + 1)))
    return out


# ---------------------------------------------------------------------------
# exponent family absorption


def check_exponent_family_absorption(family: ExponentFamily, flavor: str,
                                     index_grid=DEFAULT_INDEX_GRID,
                                     horizon: int | None = None,
                                     cfg: Config | None = None) -> Verdict:
    """For each grid index c, search a partner d (above for Roumieu, below
    for Beurling) whose per-index gap [Phi^d_j log d - Phi^c_j log c] / j
    keeps a uniform positive tail; Holds reports the worst found tail as
    the uniform margin."""
    cfg = cfg or Config()
    h = horizon if horizon is not None else cfg.horizon
    if h < 16:
        raise HorizonError(f"need horizon >= 16, got {h}")
    grid = tuple(float(c) for c in index_grid)
    if len(grid) < 2:
        raise InvalidParameterError("index_grid", "need at least 2 indices")
    if flavor not in (ROUMIEU, BEURLING):
        raise InvalidParameterError("flavor", f"unknown flavor {flavor!r}")
    subject = f"absorption-{flavor}({family.label()})"

    quarter = max(1, h // 4)
    pairs = {}
    found_all = True
    epsilons = []
    vanishing = False
    for c in grid:
        found = None
        best_gap = None
        for d, beyond in _beta_candidates(grid, c, flavor,
                                          cfg.continuation_steps):
            if d == c:
                continue
            pc, pd = family.sequence(c), family.sequence(d)
            lc_, ld = math.log(c), math.log(d)
            if flavor == ROUMIEU:
                gaps = [(pd.value(j) * ld - pc.value(j) * lc_) / j
                        for j in range(1, h + 1)]
            else:
                gaps = [(pc.value(j) * lc_ - pd.value(j) * ld) / j
                        for j in range(1, h + 1)]
            mins = [min(gaps[i * quarter:(i + 1) * quarter] or gaps[-1:])
                    for i in range(4)]
            shrink = 1.0 - cfg.stabilize_rel
            decaying = (mins[3] <= mins[2] * shrink
                        and mins[2] <= mins[1] * shrink
                        and mins[3] > 0.0)
            tail_min = mins[3]
            if best_gap is None or tail_min > best_gap["tail_min"]:
                best_gap = {"partner": d, "beyond_grid": beyond,
                            "tail_min": tail_min, "decaying": decaying,
                            "quarter_mins": mins}
            if tail_min >= _conditions.EXPONENT_GAP_FLOOR and not decaying:
                found = {"partner": d, "beyond_grid": beyond,
                         "tail_min": tail_min}
                break
        if found is not None:
            pairs[c] = found
            epsilons.append(found["tail_min"])
        else:
            found_all = False
            pairs[c] = best_gap or {"partner": None, "tail_min": None}
            if best_gap is not None and best_gap["decaying"]:
                vanishing = True
    ev = {"flavor": flavor, "pairs": {repr(c): p for c, p in pairs.items()}}
    if found_all:
        ev["epsilon"] = min(epsilons)
        return Verdict(subject, HOLDS, h, evidence=ev)
    ev["vanishing_gap"] = vanishing
    return Verdict(subject, UNDETERMINED, h, evidence=ev)
