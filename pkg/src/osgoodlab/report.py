"""Structured pass/fail reports shared by every verification operation.

A report is a flat list of check rows.  Each row names the condition it
checks (``check_id``), carries the equation-style label of that condition
(``anchor``, or the literal tag "plumbing" for infrastructure checks), the
measured quantity, the threshold it was held to, and the verdict.  Reports
serialize to canonical JSON: sorted keys, no timestamps, so identical
inputs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

__all__ = ["CheckRow", "VerificationReport", "merge_reports", "config_hash"]


def _json_default(obj):
    # numpy scalars sneak into context dicts; coerce to plain python
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


@dataclass
class CheckRow:
    check_id: str
    anchor: str
    measured: float
    threshold: float
    passed: bool
    detail: str = ""
    module: str = ""

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "measured": float(self.measured),
            "threshold": float(self.threshold),
            "passed": bool(self.passed),
            "detail": self.detail,
            "module": self.module,
        }


@dataclass
class VerificationReport:
    module: str
    rows: list[CheckRow] = field(default_factory=list)
    context: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if not row.module:
                row.module = self.module

    def add(self, row: CheckRow) -> None:
        if not row.module:
            row.module = self.module
        self.rows.append(row)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def summary(self) -> dict:
        n_pass = sum(1 for r in self.rows if r.passed)
        return {"total": len(self.rows), "passed": n_pass,
                "failed": len(self.rows) - n_pass}

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def to_dict(self) -> dict:
        return {
            "module": self.module,
            "rows": [r.to_dict() for r in self.rows],
            "summary": self.summary(),
            "context": self.context,
            "provenance": self.provenance,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent,
                          allow_nan=True, default=_json_default)


def merge_reports(reports: list[VerificationReport],
                  provenance: dict | None = None) -> VerificationReport:
    """Concatenate reports with deterministic (module, check_id) row order.

    Duplicate check ids within a module are suffixed "#2", "#3", ... in
    encounter order so merged reports stay addressable.
    """
    if not reports:
        raise ValueError("merge_reports needs at least one report")
    rows = [r for rep in reports for r in rep.rows]
    rows.sort(key=lambda r: (r.module, r.check_id))
    seen: dict[tuple[str, str], int] = {}
    out_rows = []
    for r in rows:
        key = (r.module, r.check_id)
        seen[key] = seen.get(key, 0) + 1
        if seen[key] > 1:
            r = CheckRow(f"{r.check_id}#{seen[key]}", r.anchor, r.measured,
                         r.threshold, r.passed, r.detail, r.module)
        out_rows.append(r)
    context = {rep.module: rep.context for rep in reports if rep.context}
    return VerificationReport(module="merged", rows=out_rows, context=context,
                              provenance=provenance or {})


def config_hash(config: dict) -> str:
    """Stable hash of a JSON-serializable configuration mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
