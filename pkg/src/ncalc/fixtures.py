"""Golden fixtures: record run outputs once, then diff later runs against them.

Plain-text tables must match line by line.  CSV and JSON files are compared
number by number with a mixed absolute/relative tolerance.
"""
from __future__ import annotations

import csv
import io
import json
import math
import shutil
from pathlib import Path

from .errors import InputError
from .report import atomic_write

DEFAULT_TOL = 1e-8


def record(out_dir, fixture_dir, names, force: bool = False) -> list:
    out_dir, fixture_dir = Path(out_dir), Path(fixture_dir)
    if fixture_dir.exists() and any(fixture_dir.iterdir()) and not force:
        raise InputError(f"fixtures already exist in {fixture_dir}; pass --force to overwrite")
    if fixture_dir.exists() and force:
        shutil.rmtree(fixture_dir)
    for name in sorted(names):
        atomic_write(fixture_dir / name, (out_dir / name).read_text(encoding="utf-8"))
    return sorted(names)


def _close(a: float, b: float, tol: float) -> bool:
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _diff_text(name, old: str, new: str) -> list:
    old_lines, new_lines = old.splitlines(), new.splitlines()
    out = []
    for k in range(max(len(old_lines), len(new_lines))):
        a = old_lines[k] if k < len(old_lines) else "<missing>"
        b = new_lines[k] if k < len(new_lines) else "<missing>"
        if a != b:
            entry = a.split(" = ")[0] if " = " in a else f"line {k + 1}"
            out.append(f"{name}: entry ({entry.replace(' ', ', ')}) changed: expected '{a}', got '{b}'")
    return out


def _diff_csv(name, old: str, new: str, tol: float) -> list:
    a = list(csv.reader(io.StringIO(old)))
    b = list(csv.reader(io.StringIO(new)))
    if not a or not b or a[0] != b[0]:
        return [f"{name}: header changed"]
    if len(a) != len(b):
        return [f"{name}: {len(a) - 1} rows expected, got {len(b) - 1}"]
    out = []
    for k, (ra, rb) in enumerate(zip(a[1:], b[1:]), start=2):
        for col, x, y in zip(a[0], ra, rb):
            if not _close(float(x), float(y), tol):
                out.append(f"{name}: row {k} column {col}: expected {x}, got {y}")
    return out


def _walk(prefix, a, b, tol, out):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                out.append(f"{prefix}.{k}: present on one side only")
            else:
                _walk(f"{prefix}.{k}", a[k], b[k], tol, out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(f"{prefix}: length {len(a)} expected, got {len(b)}")
        for k, (x, y) in enumerate(zip(a, b)):
            _walk(f"{prefix}[{k}]", x, y, tol, out)
    elif isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        if not _close(float(a), float(b), tol):
            out.append(f"{prefix}: expected {a!r}, got {b!r}")
    elif a != b:
        out.append(f"{prefix}: expected {a!r}, got {b!r}")


def compare(out_dir, fixture_dir, tol: float = DEFAULT_TOL) -> list:
    """Return a list of differences (empty when everything matches)."""
    out_dir, fixture_dir = Path(out_dir), Path(fixture_dir)
    if not fixture_dir.is_dir() or not any(fixture_dir.iterdir()):
        raise InputError(f"no fixtures recorded in {fixture_dir}")
    diffs = []
    for fixture in sorted(p for p in fixture_dir.iterdir() if p.is_file()):
        produced = out_dir / fixture.name
        if not produced.exists():
            diffs.append(f"{fixture.name}: not produced by this run")
            continue
        old, new = fixture.read_text(encoding="utf-8"), produced.read_text(encoding="utf-8")
        if fixture.suffix == ".csv":
            diffs += _diff_csv(fixture.name, old, new, tol)
        elif fixture.suffix == ".json":
            _walk(fixture.name, json.loads(old), json.loads(new), tol, diffs)
        else:
            diffs += _diff_text(fixture.name, old, new)
    return diffs
