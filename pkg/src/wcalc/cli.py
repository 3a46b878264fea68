"""Command-line front end.

Exit codes: 0 all verdicts acceptable, 1 any Fails (or Undetermined
without --allow-undetermined), 2 usage or script-parse errors, 3 runtime
errors.  The default horizon honors the WCALC_HORIZON environment
variable; an explicit --horizon flag beats per-query script options.
"""

from __future__ import annotations

import argparse
import sys

from .config import Config, default_config
from .errors import InvalidParameterError, SourceError, WcalcError
from . import associated as _assoc
from . import conditions as _conditions
from . import dsl as _dsl
from . import matrices as _matrices
from . import relations as _relations
from . import report as _report
from . import sequences as _sequences
from . import witness as _witness

SEQ_FAMILIES = ("gevrey", "ptt")
MATRIX_FAMILIES = ("ptt-matrix", "sigma-matrix")

_SEQ_CONDS = {"lc", "slc", "normalized", "mg", "dc", "nq", "nq_carleman",
              "beta1", "beta3", "gamma1", "gamma_lb"}
_MATRIX_CONDS = {"l": "L", "mg": "mg", "dc": "dc", "rai": "rai",
                 "fdb": "FdB", "br": "BR", "sc": "sc", "constant": "constant"}

_REL_NAMES = {"preceq": "preceq", "triangle": "triangle", "approx": "approx",
              "pointwise_le": "pointwise_le", "quotient_le": "quotient_le",
              "bigo": "bigO", "smallo": "smallO",
              "numeric_ratio": "numeric_ratio"}


class UsageError(Exception):
    pass


def _parse_params(text: str | None) -> dict:
    out: dict[str, float] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise UsageError(f"--params entries look like k=v, got {part!r}")
        key, _, val = part.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--params value for {key!r} is not a number: {val!r}")
    return out


def _parse_number_list(text: str, what: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated number list, got {text!r}")


def _family(spec: str, params: dict):
    """(kind, object, label) from a family spec like gevrey:1 or ptt-matrix.

    Colon parts are positional parameters; --params entries fill or
    override them.
    """
    name, *rest = spec.split(":")
    name = name.strip().lower()
    pos = []
    for part in rest:
        try:
            pos.append(float(part))
        except ValueError:
            raise UsageError(f"bad numeric parameter {part!r} in {spec!r}")

    def take(key: str, i: int, default=None):
        if key in params:
            return params[key]
        if i < len(pos):
            return pos[i]
        if default is not None:
            return default
        raise UsageError(f"family {name!r} needs parameter {key!r}")

    grid = params.get("__grid__")
    if name == "gevrey":
        return "seq", _sequences.gevrey(take("s", 0)), spec
    if name == "ptt":
        return "seq", _sequences.ptt(take("tau", 0), take("sigma", 1)), spec
    if name == "ptt-matrix":
        mm = _matrices.ptt_matrix(take("tau", 0), take("sigma", 1),
                                  grid or _matrices.DEFAULT_INDEX_GRID)
        return "matrix", mm, spec
    if name == "sigma-matrix":
        mm = _matrices.sigma_matrix(take("sigma", 0),
                                    grid or _matrices.DEFAULT_INDEX_GRID)
        return "matrix", mm, spec
    raise UsageError(f"unknown family {name!r}; expected one of "
                     f"{SEQ_FAMILIES + MATRIX_FAMILIES}")


def _element_params(params: dict, pos_c: float | None = None) -> float | None:
    if "c" in params:
        return params["c"]
    return pos_c


def _sequence_from(spec: str, params: dict):
    """A weight sequence: either a sequence family or a matrix element.

    Matrix element selection: c= in --params, or a trailing colon part
    (ptt-matrix:TAU:SIGMA:C, sigma-matrix:SIGMA:TAU)."""
    name, *rest = spec.split(":")
    name = name.strip().lower()
    kind, obj, label = _family(spec, params) if name not in MATRIX_FAMILIES \
        else _family(":".join([name] + rest[:2 if name == "ptt-matrix" else 1]),
                     params)
    if kind == "seq":
        return obj, label
    extra = rest[2:] if name == "ptt-matrix" else rest[1:]
    pos_c = float(extra[0]) if extra else None
    c = _element_params(params, pos_c)
    if c is None:
        raise UsageError(f"matrix family {spec!r} needs an element index "
                         "(c= in --params or a trailing :C)")
    return obj.element(c), f"{label}@c={c:g}"


def _parse_t_grid(text: str) -> _assoc.LogGrid:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--t-grid looks like a:b:n, got {text!r}")
    try:
        return _assoc.LogGrid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise UsageError(str(exc))


def _phi_from(spec: str | None):
    if spec is None:
        return None
    name, *rest = spec.split(":")
    name = name.strip().lower()
    if name == "linear":
        return _sequences.linear_exponents()
    if name == "power":
        if not rest:
            raise UsageError("power exponents need a parameter: power:SIGMA")
        return _sequences.power_exponents(float(rest[0]))
    raise UsageError(f"unknown exponent spec {spec!r}; expected linear or power:S")


def _exit_code(records, allow_undetermined: bool) -> int:
    if _report.has_errors(records):
        return 3
    statuses = _report.collect_statuses(records)
    if any(s == "Fails" for s in statuses):
        return 1
    if not allow_undetermined and any(s == "Undetermined" for s in statuses):
        return 1
    return 0


def _write_report(report: _report.Report, args) -> None:
    if getattr(args, "out", None):
        with open(args.out, "wb") as fh:
            fh.write(_report.emit_json(report))
    fmt = getattr(args, "format", None) or "text"
    sys.stdout.write(_report.emit(report, fmt).decode("utf-8"))


def _base_config(args) -> Config:
    cfg = default_config()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _effective_horizon(args, cfg: Config) -> int:
    return args.horizon if getattr(args, "horizon", None) is not None \
        else cfg.horizon


# ---------------------------------------------------------------------------
# subcommands


def _cmd_run(args) -> int:
    cfg = _base_config(args)
    with open(args.script, encoding="utf-8") as fh:
        text = fh.read()
    program = _dsl.parse(text)
    records = _dsl.execute(program, cfg, horizon_override=args.horizon)
    _write_report(_report.Report(cfg, records), args)
    return _exit_code(records, args.allow_undetermined)


def _cmd_check(args) -> int:
    cfg = _base_config(args)
    h = _effective_horizon(args, cfg)
    params = _parse_params(args.params)
    if args.grid:
        params["__grid__"] = _parse_number_list(args.grid, "--grid")
    cond = args.cond.strip().replace("-", "_")
    records = []
    fam_name = args.family.split(":")[0].strip().lower()
    matrix_level = (fam_name in MATRIX_FAMILIES and "c" not in params
                    and cond.lower() in _MATRIX_CONDS
                    and cond != "gamma_lb")
    if matrix_level:
        kind, mm, label = _family(args.family, params)
        tag = _MATRIX_CONDS[cond.lower()]
        cid = _matrices.condition_id(tag, args.flavor or "r")
        res = _matrices.check_matrix_condition(mm, cid, None, h, cfg)
        rec = {"query": f"check {tag}({label}) horizon {h} flavor {cid.flavor};"}
        rec.update(_matrices.matrix_report_json(cid, res))
        rec["statuses"] = [res[alpha].status for alpha in sorted(res)]
        records.append(rec)
    else:
        seq, label = _sequence_from(args.family, params)
        if cond == "gamma_lb":
            if not args.alphas:
                raise UsageError("--cond gamma-lb needs --alphas")
            alphas = _parse_number_list(args.alphas, "--alphas")
            res = _conditions.gamma_lower_bound(seq, alphas, h, cfg)
            rec = {"query": f"check gamma_lb({label}, {list(alphas)}) horizon {h};",
                   "per_alpha": {repr(a): v.to_json() for a, v in res.items()},
                   "statuses": [res[a].status for a in alphas]}
            records.append(rec)
        else:
            if cond not in _SEQ_CONDS:
                raise UsageError(f"unknown condition {args.cond!r}")
            v = _conditions.check_condition(seq, cond, h, cfg)
            rec = {"query": f"check {cond}({label}) horizon {h};"}
            rec.update(v.to_json())
            records.append(rec)
    _write_report(_report.Report(cfg, records), args)
    return _exit_code(records, args.allow_undetermined)


def _cmd_omega(args) -> int:
    cfg = _base_config(args)
    # tabulation wants the sup actually attained; default to the index cap
    # rather than the check horizon, which an explicit --horizon overrides
    h = args.horizon if args.horizon is not None else cfg.omega_index_cap
    params = _parse_params(args.params)
    seq, label = _sequence_from(args.family, params)
    grid = _parse_t_grid(args.t_grid) if args.t_grid \
        else _assoc.LogGrid.from_config(cfg)
    omega = _assoc.OmegaFunction.from_sequence(seq, cfg=cfg)
    rows = _assoc.export_csv(omega, grid, args.csv, h, cfg)
    records = [{"query": f"omega({label}) grid [{grid.t_min:g}, {grid.t_max:g}, "
                         f"{grid.points}];",
                "rows": rows, "csv": args.csv}]
    _write_report(_report.Report(cfg, records), args)
    return 0


def _cmd_compare(args) -> int:
    cfg = _base_config(args)
    h = _effective_horizon(args, cfg)
    left, llabel = _sequence_from(args.left, _parse_params(args.left_params))
    right, rlabel = _sequence_from(args.right, _parse_params(args.right_params))
    rel_key = args.rel.strip().replace("-", "_").lower()
    rel = _REL_NAMES.get(rel_key)
    if rel is None:
        raise UsageError(f"unknown relation {args.rel!r}; expected one of "
                         f"{sorted(set(_REL_NAMES.values()))}")
    if rel in ("bigO", "smallO"):
        v = _assoc.assoc_relation_check(left, right, rel, args.c_max, h, cfg=cfg)
    elif rel == "numeric_ratio":
        v = _assoc.assoc_relation_check(left, right, rel, horizon=h, cfg=cfg)
    else:
        v = _relations.compare(left, right, rel, h, cfg)
    rec = {"query": f"compare {rel}({llabel}, {rlabel}) horizon {h};"}
    rec.update(v.to_json())
    records = [rec]
    _write_report(_report.Report(cfg, records), args)
    return _exit_code(records, args.allow_undetermined)


def _cmd_classify(args) -> int:
    cfg = _base_config(args)
    params = _parse_params(args.params)
    if args.grid:
        params["__grid__"] = _parse_number_list(args.grid, "--grid")
    kind, mm, label = _family(args.matrix, params)
    if kind != "matrix":
        raise UsageError(f"--matrix needs a matrix family, got {args.matrix!r}")
    if args.bounds.endswith(".json"):
        bounds = _witness.load_bounds_json(args.bounds)
    else:
        bounds = _witness.load_bounds_csv(args.bounds)
    phi = _phi_from(args.phi)
    h_grid = _parse_number_list(args.h_grid, "--h-grid") if args.h_grid \
        else _witness.DEFAULT_H_GRID
    rep = _witness.classify_membership(bounds, mm, phi, None, h_grid, cfg)
    rec = {"query": f"classify membership({args.bounds}, {label});"}
    rec.update(rep.to_json())
    rec["statuses"] = [rep.roumieu.status, rep.beurling.status]
    records = [rec]
    _write_report(_report.Report(cfg, records), args)
    return _exit_code(records, args.allow_undetermined)


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--horizon", type=int, default=None,
                   help="index horizon (beats script options and "
                        "WCALC_HORIZON)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for the off-diagonal pair sample")
    p.add_argument("--out", default=None, help="write canonical JSON here")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text",
                   help="stdout format (default text)")
    p.add_argument("--allow-undetermined", action="store_true",
                   help="exit 0 even when verdicts are Undetermined")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcalc",
        description="Finite-horizon calculus for weight sequences, weight "
                    "matrices, and their associated functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a .wsq script")
    p.add_argument("script")
    _add_common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("check", help="one-shot condition check on a family")
    p.add_argument("--family", required=True,
                   help="gevrey:S | ptt:TAU:SIGMA | ptt-matrix | sigma-matrix")
    p.add_argument("--params", default=None, help="k=v,... family parameters")
    p.add_argument("--cond", required=True,
                   help="lc|slc|normalized|mg|dc|nq|nq-carleman|beta1|beta3|"
                        "gamma1|gamma-lb or a matrix condition "
                        "(L|mg|dc|rai|FdB|BR|sc|constant)")
    p.add_argument("--flavor", default=None, help="r|b for matrix conditions")
    p.add_argument("--alphas", default=None, help="comma list for gamma-lb")
    p.add_argument("--grid", default=None, help="matrix index grid, comma list")
    _add_common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("omega", help="tabulate an associated function to CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default=None)
    p.add_argument("--t-grid", dest="t_grid", default=None,
                   help="a:b:n geometric evaluation grid")
    p.add_argument("--csv", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(fn=_cmd_omega)

    p = sub.add_parser("compare", help="order relation between two sequences")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--left-params", dest="left_params", default=None)
    p.add_argument("--right-params", dest="right_params", default=None)
    p.add_argument("--rel", required=True,
                   help="preceq|triangle|approx|pointwise-le|quotient-le|"
                        "bigO|smallO|numeric-ratio")
    p.add_argument("--c-max", dest="c_max", type=int, default=4)
    _add_common(p)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("classify", help="membership of derivative-bound data")
    p.add_argument("--bounds", required=True, help="CSV (j,log_bound) or JSON")
    p.add_argument("--matrix", required=True,
                   help="ptt-matrix:TAU:SIGMA | sigma-matrix:SIGMA")
    p.add_argument("--params", default=None)
    p.add_argument("--phi", default=None, help="linear | power:SIGMA")
    p.add_argument("--grid", default=None, help="matrix index grid, comma list")
    p.add_argument("--h-grid", dest="h_grid", default=None,
                   help="comma list of h values")
    _add_common(p)
    p.set_defaults(fn=_cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.fn(args)
    except (UsageError, SourceError, InvalidParameterError) as exc:
        print(f"wcalc: {exc}", file=sys.stderr)
        return 2
    except (WcalcError, OSError, ValueError, ArithmeticError) as exc:
        print(f"wcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
