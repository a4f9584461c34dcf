"""Run reports, deterministic serialization and atomic file output."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError


def atomic_write(path, text: str):
    """Write text through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    """CSV with a header row; floats carry 17 significant digits."""
    rows = list(rows)
    if not rows:
        raise InputError("refusing to write an empty CSV table")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise InputError("CSV row length does not match the header")
        writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def emit_plot_data(header, rows, path):
    atomic_write(path, csv_text(header, rows))


def _num(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass
class CheckRecord:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "value": _num(self.value), "tolerance": self.tolerance,
                "passed": self.passed, "detail": self.detail}


@dataclass
class RunReport:
    scenario: str
    command: str
    records: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def check(self, name: str, value, tolerance: float, detail: str = "", mode: str = "le") -> bool:
        """Record |value| <= tolerance (mode "le") or value >= tolerance (mode "ge")."""
        v = float(value)
        if mode == "le":
            ok = math.isfinite(v) and abs(v) <= tolerance
        elif mode == "ge":
            ok = v >= tolerance
        else:
            raise ValueError(mode)
        self.records.append(CheckRecord(name, v, float(tolerance), bool(ok), detail))
        return ok

    def fail(self, name: str, detail: str):
        self.records.append(CheckRecord(name, math.nan, 0.0, False, detail))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> str:
        doc = {
            "scenario": self.scenario,
            "command": self.command,
            "status": "pass" if self.passed else "fail",
            "checks": [r.to_dict() for r in self.records],
            "outputs": sorted(self.outputs),
            "values": {k: _num(v) for k, v in sorted(self.values.items())},
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"scenario {self.scenario} ({self.command})"]
        for r in self.records:
            flag = "PASS" if r.passed else "FAIL"
            tail = f"  {r.detail}" if r.detail else ""
            lines.append(f"{flag}  {r.name}: {r.value:.3e} (tolerance {r.tolerance:.1e}){tail}")
        lines.append(f"status: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"
