"""Weight sequences and exponent sequences, evaluated in log scale.

A weight sequence M = (M_j) is exposed only through log M_j (a float per
index, -inf unused: weights are positive).  Families are closed-form where
possible so indices far beyond any memo stay O(1):

    gevrey(s):        log M_j = s * lgamma(j + 1)
    ptt(tau, sigma):  log M_j = tau * j^sigma * ln j   (0^0 := 1, so j=0 -> 0)
    scaled(M, phi, c): log M_j + phi_j * ln c
    table(values):    finite data, never extrapolates

Exponent sequences phi = (phi_j) are plain nonnegative floats (they live in
the exponent, not in the log domain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import InvalidParameterError, PreconditionError, TableExhaustedError


def _check_index(j: int) -> int:
    if not isinstance(j, int) or isinstance(j, bool) or j < 0:
        raise InvalidParameterError("j", f"index must be a nonnegative integer, got {j!r}")
    return j


# ---------------------------------------------------------------------------
# exponent sequences


@dataclass(eq=False)
class ExponentSequence:
    """Nonnegative exponent sequence phi, one float per index."""

    kind: str
    params: dict
    _fn: Callable[[int], float]
    length: int | None = None

    def value(self, j: int) -> float:
        _check_index(j)
        if self.length is not None and j >= self.length:
            raise TableExhaustedError(j, self.length)
        v = float(self._fn(j))
        if math.isnan(v) or v < 0.0 or math.isinf(v):
            raise InvalidParameterError("phi", f"phi_{j} = {v!r} is not a finite nonnegative value")
        return v

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


def linear_exponents() -> ExponentSequence:
    """phi_j = j."""
    return ExponentSequence("linear", {}, float)


def power_exponents(sigma: float) -> ExponentSequence:
    """phi_j = j^sigma, sigma >= 1."""
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 1.0:
        raise InvalidParameterError("sigma", f"need sigma >= 1, got {sigma!r}")
    return ExponentSequence("power", {"sigma": sigma}, lambda j: float(j) ** sigma)


def table_exponents(values) -> ExponentSequence:
    vals = [float(v) for v in values]
    if not vals:
        raise InvalidParameterError("values", "empty exponent table")
    for j, v in enumerate(vals):
        if math.isnan(v) or math.isinf(v) or v < 0.0:
            raise InvalidParameterError("values", f"entry {j} = {v!r} not finite nonnegative")
    return ExponentSequence("table", {"length": len(vals)}, vals.__getitem__, length=len(vals))


def callable_exponents(fn: Callable[[int], float], label: str) -> ExponentSequence:
    return ExponentSequence("generic", {"label": label}, fn)


@dataclass(eq=False)
class ExponentFamily:
    """Indexed family a -> phi^(a) of exponent sequences, a > 0."""

    kind: str
    params: dict
    _fn: Callable[[float], ExponentSequence]

    def sequence(self, a: float) -> ExponentSequence:
        a = float(a)
        if not (a > 0.0) or math.isinf(a):
            raise InvalidParameterError("a", f"family index must be finite positive, got {a!r}")
        return self._fn(a)

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"family:{self.kind}({inner})"


def constant_family(phi: ExponentSequence) -> ExponentFamily:
    """Every family index shares the same exponent sequence."""
    return ExponentFamily("constant", {"phi": phi.label()}, lambda a: phi)


def indexed_family(fn: Callable[[float], ExponentSequence], label: str) -> ExponentFamily:
    return ExponentFamily("indexed", {"label": label}, fn)


# ---------------------------------------------------------------------------
# weight sequences


@dataclass(eq=False)
class WeightSequence:
    """Positive sequence handled through log-scale terms, memoized per index."""

    family: str
    params: dict
    _fn: Callable[[int], float] = field(repr=False)
    length: int | None = None
    horizon_hint: int = 512
    _memo: dict = field(default_factory=dict, repr=False)

    def log_term(self, j: int) -> float:
        """log M_j.  Raises TableExhaustedError past table data."""
        _check_index(j)
        got = self._memo.get(j)
        if got is None:
            if self.length is not None and j >= self.length:
                raise TableExhaustedError(j, self.length)
            got = float(self._fn(j))
            if math.isnan(got) or got == math.inf:
                raise InvalidParameterError("term", f"log M_{j} = {got!r} not finite")
            self._memo[j] = got
        return got

    def quotient_log(self, j: int) -> float:
        """log(M_j / M_{j-1}); the j = 0 quotient is defined as 1."""
        _check_index(j)
        if j == 0:
            return 0.0
        return self.log_term(j) - self.log_term(j - 1)

    def reduced_log(self, j: int) -> float:
        """log(M_j / j!)."""
        return self.log_term(j) - math.lgamma(j + 1)

    def root_log(self, j: int) -> float:
        """log((M_j)^(1/j)), j >= 1."""
        if _check_index(j) == 0:
            raise InvalidParameterError("j", "root is defined for j >= 1")
        return self.log_term(j) / j

    def max_index(self) -> int | None:
        return None if self.length is None else self.length - 1

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()) if not k.startswith("_"))
        return f"{self.family}({inner})"

    def to_json(self) -> dict:
        return {"family": self.family, "params": {k: v for k, v in self.params.items() if not k.startswith("_")}}


def gevrey(s: float) -> WeightSequence:
    """log M_j = s * log j!  (factorial-power scale)."""
    s = float(s)
    if not math.isfinite(s) or s <= 0.0:
        raise InvalidParameterError("s", f"need s > 0, got {s!r}")
    return WeightSequence("gevrey", {"s": s}, lambda j: s * math.lgamma(j + 1))


def ptt(tau: float, sigma: float) -> WeightSequence:
    """log M_j = tau * j^sigma * ln j, with the j = 0 term equal to 1."""
    tau = float(tau)
    sigma = float(sigma)
    if not math.isfinite(tau) or tau <= 0.0:
        raise InvalidParameterError("tau", f"need tau > 0, got {tau!r}")
    if not math.isfinite(sigma) or sigma < 1.0:
        raise InvalidParameterError("sigma", f"need sigma >= 1, got {sigma!r}")

    def term(j: int) -> float:
        if j == 0:
            return 0.0
        return tau * float(j) ** sigma * math.log(j)

    return WeightSequence("ptt", {"tau": tau, "sigma": sigma}, term)


def table(values=None, log_values=None) -> WeightSequence:
    """Finite sequence from linear-scale values (or ready log values)."""
    if (values is None) == (log_values is None):
        raise InvalidParameterError("values", "pass exactly one of values / log_values")
    if values is not None:
        logs = []
        for j, v in enumerate(values):
            v = float(v)
            if not (v > 0.0) or math.isinf(v):
                raise InvalidParameterError("values", f"entry {j} = {v!r} not finite positive")
            logs.append(math.log(v))
    else:
        logs = [float(v) for v in log_values]
        for j, v in enumerate(logs):
            if math.isnan(v) or math.isinf(v):
                raise InvalidParameterError("log_values", f"entry {j} = {v!r} not finite")
    if not logs:
        raise InvalidParameterError("values", "empty table")
    return WeightSequence(
        "table", {"length": len(logs)}, logs.__getitem__, length=len(logs),
        horizon_hint=len(logs) - 1,
    )


def scaled(base: WeightSequence, phi: ExponentSequence, c: float) -> WeightSequence:
    """log M_j + phi_j * ln c: exponent-weighted rescaling of a base sequence."""
    c = float(c)
    if not (c > 0.0) or math.isinf(c):
        raise InvalidParameterError("c", f"need finite c > 0, got {c!r}")
    log_c = math.log(c)
    length = base.length
    if phi.length is not None:
        length = phi.length if length is None else min(length, phi.length)
    return WeightSequence(
        "scaled",
        {"base": base.label(), "phi": phi.label(), "c": c, "_base": base, "_phi": phi},
        lambda j: base.log_term(j) + phi.value(j) * log_c,
        length=length,
        horizon_hint=base.horizon_hint,
    )


def callable_sequence(family: str, params: dict, fn: Callable[[int], float],
                      length: int | None = None) -> WeightSequence:
    """Escape hatch for derived families (associated-function terms etc.)."""
    return WeightSequence(family, params, fn, length=length)


def regularize_slc(m: WeightSequence, horizon: int) -> WeightSequence:
    """Patch the head of M so the reduced quotients are non-decreasing.

    Scans for the smallest index from which (a) the reduced quotients
    mu_j / j are non-decreasing through the horizon and (b) mu_j / j >= 1.
    Below that index the reduced quotients are replaced by exactly 1, which
    keeps the output equivalent to the input (the tail terms differ from
    M_j by one fixed constant) while making it normalized and strongly
    log-convex on [0, horizon].  Output params carry patch_index (0 when
    the input already qualifies and is unchanged).
    """
    if horizon < 4:
        raise InvalidParameterError("horizon", f"need horizon >= 4, got {horizon}")
    terms = [m.log_term(j) for j in range(horizon + 1)]
    # quotient jitter scales with the term magnitude, not the quotient itself
    slack = 1e-12 * max(1.0, max(abs(t) for t in terms))
    q = [terms[j] - terms[j - 1] - math.log(j) for j in range(1, horizon + 1)]
    mono_onset = 1
    for i in range(len(q) - 1, 0, -1):
        if q[i] < q[i - 1] - slack:
            # pair (j-1, j) with j = i+1 violates; monotone from j on.
            mono_onset = i + 1
            break
    neg_onset = 1
    for i in range(len(q) - 1, -1, -1):
        if q[i] < -slack:
            neg_onset = i + 1 + 1
            break
    patch = max(mono_onset, neg_onset)
    if patch > horizon:
        raise PreconditionError(
            "no index below the horizon from which the reduced quotients are "
            "non-decreasing and at least 1; largest violating index "
            f"{patch - 1}", witness=patch - 1,
        )

    base_anchor = m.log_term(patch - 1)
    head = math.lgamma(patch)  # log (patch-1)!

    unchanged = patch == 1 and abs(m.log_term(0)) == 0.0
    if unchanged:
        reported = 0
    else:
        reported = patch if patch >= 2 else 1

    def term(j: int) -> float:
        if j < patch:
            return math.lgamma(j + 1)
        return head + (m.log_term(j) - base_anchor)

    return WeightSequence(
        "regularized",
        {"base": m.label(), "patch_index": reported, "_base": m},
        m.log_term if unchanged else term,
        length=m.length,
        horizon_hint=m.horizon_hint,
    )


_FAMILIES = ("gevrey", "ptt", "table", "scaled")


def make_sequence(spec: dict) -> WeightSequence:
    """Build a sequence from a {family, params} description (JSON surface)."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise InvalidParameterError("spec", "expected a {family, params} object")
    family = spec["family"]
    params = spec.get("params", {})
    if family == "gevrey":
        return gevrey(params.get("s", 1.0))
    if family == "ptt":
        return ptt(params.get("tau", 1.0), params.get("sigma", 1.0))
    if family == "table":
        if "log_values" in params:
            return table(log_values=params["log_values"])
        return table(values=params.get("values"))
    if family == "scaled":
        base = make_sequence(params["base"])
        phi = make_exponents(params["phi"])
        return scaled(base, phi, params.get("c", 1.0))
    raise InvalidParameterError("family", f"unknown family {family!r}; expected one of {_FAMILIES}")


def make_exponents(spec: dict) -> ExponentSequence:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidParameterError("spec", "expected a {kind, params} object")
    kind = spec["kind"]
    params = spec.get("params", {})
    if kind == "linear":
        return linear_exponents()
    if kind == "power":
        return power_exponents(params.get("sigma", 1.0))
    if kind == "table":
        return table_exponents(params.get("values"))
    raise InvalidParameterError("kind", f"unknown exponent kind {kind!r}")
