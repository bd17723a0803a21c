"""Result envelopes and their CSV / JSON serialization.

CSV dialect: ``#``-prefixed metadata lines (config echo, derived scalars,
warnings), then one header row of ``name (unit)`` cells, then data rows.
Floats are written with 17 significant digits so they re-parse exactly.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field

DERIVED_UNITS = {
    "eta_c": "1",
    "eta_c_effective": "1",
    "kappa": "rad/s",
    "q_m": "1",
    "x_zpf": "m",
    "omega_c": "rad/s",
    "cooperativity": "1",
    "gamma_omit": "rad/s",
    "group_delay_center": "s",
}

_HEADER_CELL = re.compile(r"^\s*(.*?)\s*\((.*)\)\s*$")


@dataclass
class ResultEnvelope:
    command: str
    config: str
    derived: dict
    columns: tuple
    units: tuple
    rows: list
    warnings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "derived": self.derived,
            "derived_units": {k: DERIVED_UNITS.get(k, "") for k in self.derived},
            "warnings": list(self.warnings),
            "table": {"columns": list(self.columns), "units": list(self.units),
                      "rows": [list(r) for r in self.rows]},
        }
        payload.update(self.extra)
        return json.dumps(payload, indent=2, allow_nan=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# command: {self.command}\n")
        for line in self.config.rstrip("\n").splitlines():
            buf.write(f"# config: {line}\n")
        for key, value in self.derived.items():
            buf.write(f"# derived: {key} = {format_cell(value)} {DERIVED_UNITS.get(key, '')}".rstrip()
                      + "\n")
        for w in self.warnings:
            buf.write(f"# warning: {w}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"{c} ({u})" for c, u in zip(self.columns, self.units)])
        for row in self.rows:
            writer.writerow([format_cell(v) for v in row])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def read_csv_table(text: str):
    """Parse our CSV dialect into ``(columns, units, rows)``; cells stay strings."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("no header row found")
    reader = csv.reader(lines)
    header = next(reader)
    columns, units = [], []
    for cell in header:
        m = _HEADER_CELL.match(cell)
        if m:
            columns.append(m.group(1))
            units.append(m.group(2))
        else:
            columns.append(cell.strip())
            units.append("")
    rows = [row for row in reader]
    return columns, units, rows


def read_csv_column(text: str, name: str):
    """Axis values, values of column ``name`` and both units."""
    columns, units, rows = read_csv_table(text)
    if name not in columns:
        raise KeyError(f"column {name!r} not found; available: {columns}")
    j = columns.index(name)
    x = [float(r[0]) for r in rows]
    y = [float(r[j]) for r in rows]
    return x, y, units[0], units[j]
