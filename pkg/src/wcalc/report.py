"""Report container and the three emitters (canonical JSON, CSV, text).

The JSON form is byte-stable: sorted keys, fixed separators, trailing
newline, no timestamps.  Two runs with the same config produce identical
bytes, which is what the golden-file tests pin down.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .config import Config

SCHEMA_NAME = "wcalc-report"
VERSION = "0.1.0"

_FORMATS = ("json", "csv", "text")


@dataclass
class Report:
    config: Config
    records: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_NAME,
            "version": VERSION,
            "config": self.config.to_dict(),
            "records": list(self.records),
        }


def _scalar(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool))


def emit_json(report: Report) -> bytes:
    text = json.dumps(report.to_dict(), sort_keys=True, indent=2,
                      ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def emit_csv(report: Report) -> bytes:
    keys: set[str] = set()
    for rec in report.records:
        keys.update(k for k, v in rec.items() if _scalar(v))
    head = ["index"] + (["query"] if "query" in keys else []) \
        + sorted(keys - {"query"})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(head)
    for i, rec in enumerate(report.records):
        row = []
        for col in head:
            if col == "index":
                row.append(i)
                continue
            v = rec.get(col)
            row.append("" if v is None or not _scalar(v) else v)
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def _summarize(rec: dict) -> str:
    if "error" in rec:
        err = rec["error"]
        return f"error[{err.get('type')}]: {err.get('message')}"
    if "statuses" in rec:
        return ", ".join(rec["statuses"])
    if "status" in rec:
        return rec["status"]
    for key in ("value", "real"):
        if key in rec:
            return repr(rec[key])
    return "ok"

def emit_text(report: Report) -> bytes:
    lines = [f"{SCHEMA_NAME} {VERSION}  horizon={report.config.horizon} "
             f"seed={report.config.seed}"]
    for i, rec in enumerate(report.records):
        lines.append(f"[{i}] {rec.get('query', '')}")
        lines.append(f"    {_summarize(rec)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        return emit_json(report)
    if fmt == "csv":
        return emit_csv(report)
    if fmt == "text":
        return emit_text(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {_FORMATS}")


def collect_statuses(records) -> list[str]:
    """Every verdict status mentioned anywhere in the records, in order."""
    out: list[str] = []
    for rec in records:
        if "status" in rec and isinstance(rec["status"], str):
            out.append(rec["status"])
        for s in rec.get("statuses", []):
            out.append(s)
    return out


def has_errors(records) -> bool:
    return any("error" in rec for rec in records)
