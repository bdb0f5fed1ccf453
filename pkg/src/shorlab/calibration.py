"""Backend calibration CSV parsing and physical-qubit ranking."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path


class MissingColumn(ValueError):
    pass


class MalformedRow(ValueError):
    pass


class NotEnoughQubits(ValueError):
    pass


@dataclass(frozen=True)
class QubitCalRow:
    qubit: int
    sx_error: float
    t1_us: float
    t2_us: float


def _find_column(names: list[str], wanted: str) -> str:
    for name in names:
        if name.strip() == wanted:
            return name
    if wanted == "√x (sx) error":
        # Exports differ in how they spell the sqrt prefix; "(sx) error" is stable.
        for name in names:
            if name.strip().lower().endswith("(sx) error"):
                return name
    raise MissingColumn(f"calibration CSV has no {wanted!r} column")


def parse_calibration_csv(text: str) -> list[QubitCalRow]:
    reader = csv.DictReader(io.StringIO(text))
    names = reader.fieldnames or []
    cols = {
        key: _find_column(names, wanted)
        for key, wanted in (
            ("qubit", "Qubit"),
            ("sx_error", "√x (sx) error"),
            ("t1_us", "T1 (us)"),
            ("t2_us", "T2 (us)"),
        )
    }
    rows: list[QubitCalRow] = []
    seen: set[int] = set()
    for line_no, rec in enumerate(reader, start=2):
        try:
            row = QubitCalRow(
                qubit=int(rec[cols["qubit"]].strip()),
                sx_error=float(rec[cols["sx_error"]]),
                t1_us=float(rec[cols["t1_us"]]),
                t2_us=float(rec[cols["t2_us"]]),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            raise MalformedRow(f"line {line_no}: {exc}") from None
        vals = (row.sx_error, row.t1_us, row.t2_us)
        if not all(math.isfinite(v) for v in vals) or row.sx_error < 0 or row.t1_us <= 0 or row.t2_us <= 0:
            raise MalformedRow(f"line {line_no}: out-of-range calibration values {vals}")
        if row.qubit in seen:
            raise MalformedRow(f"line {line_no}: duplicate qubit {row.qubit}")
        seen.add(row.qubit)
        rows.append(row)
    return rows


def load_calibration_csv(path: str | Path) -> list[QubitCalRow]:
    return parse_calibration_csv(Path(path).read_text(encoding="utf-8-sig"))


def rank_qubits(rows: list[QubitCalRow], n: int) -> list[int]:
    """Lowest sx error first, then longest T1, then longest T2, then lowest id."""
    if n > len(rows):
        raise NotEnoughQubits(f"asked for {n} qubits, calibration lists {len(rows)}")
    ordered = sorted(rows, key=lambda r: (r.sx_error, -r.t1_us, -r.t2_us, r.qubit))
    return [r.qubit for r in ordered[:n]]
