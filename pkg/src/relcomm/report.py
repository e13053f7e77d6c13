"""Verification records, line-delimited report files and the summary table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

STATUSES = ("pass", "fail", "skipped", "randomized-pass", "skipped-hypotheses")
FIELDS = ("check_id", "instance", "status", "cardinalities", "witness", "elapsed", "seed")


@dataclass
class VerificationRecord:
    check_id: str
    instance: dict
    status: str
    cardinalities: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    elapsed: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "fail" and not self.witness:
            raise ValueError(f"{self.check_id}: a failing record needs a witness")
        if self.status == "randomized-pass" and "samples" not in self.cardinalities:
            raise ValueError(f"{self.check_id}: a randomized record needs its sample count")

    @property
    def failed(self):
        return self.status == "fail"

    def to_dict(self):
        return {k: getattr(self, k) for k in FIELDS}

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"), default=_json_default)


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def matrix_witness(space, g, word=None, note=None) -> dict:
    """Row-major element literals, e.g. ``[["1","2"],["0","1"]]``."""
    R = space.R
    w = {"matrix": [[R.fmt(int(x)) for x in row] for row in np.asarray(g)]}
    if word is not None:
        w["word"] = word
    if note:
        w["note"] = note
    return w


def parse_matrix_witness(space, witness: dict):
    return np.array([[space.R.parse(t) for t in row] for row in witness["matrix"]], dtype=np.int64)


def sort_records(records):
    """Deterministic emission order: check_id, then the instance text."""
    return sorted(records, key=lambda r: (r.check_id, json.dumps(r.instance, sort_keys=True, default=_json_default)))


def emit_report(records, path=None, stream=None, timings: bool = False) -> str:
    """Write one JSON object per line to path; print the summary table to stream."""
    recs = sort_records(records)
    if not timings:
        for r in recs:
            r.elapsed = None
    text = "".join(r.to_json() + "\n" for r in recs)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    if stream is not None:
        stream.write(summary_table(recs) + "\n")
    return text


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return [VerificationRecord(**json.loads(line)) for line in fh if line.strip()]


def _instance_label(inst):
    parts = [str(inst.get("ring", ""))]
    if inst.get("n") is not None:
        parts.append(f"n={inst['n']}")
    if inst.get("ideals"):
        parts.append(" ".join(inst["ideals"]))
    return " ".join(p for p in parts if p)


def summary_table(records) -> str:
    recs = list(records)
    if not recs:
        return "0 checks"
    w1 = max(len("check"), *(len(r.check_id) for r in recs))
    labels = [_instance_label(r.instance) for r in recs]
    w2 = max(len("instance"), *(len(s) for s in labels))
    lines = [f"{'check':<{w1}}  {'instance':<{w2}}  status", "-" * (w1 + w2 + 20)]
    for r, lab in zip(recs, labels):
        lines.append(f"{r.check_id:<{w1}}  {lab:<{w2}}  {r.status}")
    counts = {}
    for r in recs:
        counts[r.status] = counts.get(r.status, 0) + 1
    tail = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    lines.append(f"{len(recs)} checks: {tail}")
    return "\n".join(lines)


def any_failed(records) -> bool:
    return any(r.failed for r in records)
