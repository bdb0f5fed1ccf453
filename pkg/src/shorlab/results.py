"""Results JSON in the hardware script's schema, plus an optional extensions block."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .simulator import Counts

REQUIRED = ("experiment", "backend", "physical_qubits", "shots", "counts")
BACKEND_ID = "shorlab-statevector"


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class ResultsDocument:
    experiment: str
    backend: str
    physical_qubits: list
    shots: int
    counts: dict[str, int]
    extensions: Optional[dict[str, Any]] = field(default=None)

    @property
    def n(self) -> int:
        return len(next(iter(self.counts))) // 2

    def to_counts(self) -> Counts:
        return Counts(sum(self.counts.values()), dict(self.counts))

    def to_dict(self) -> dict:
        d = {
            "experiment": self.experiment,
            "backend": self.backend,
            "physical_qubits": list(self.physical_qubits),
            "shots": self.shots,
            "counts": dict(sorted(self.counts.items())),
        }
        if self.extensions is not None:
            d["extensions"] = self.extensions
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=4, sort_keys=True, ensure_ascii=False) + "\n"

    def run_id(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:12]


def _check_float_free(obj: Any, where: str = "extensions") -> None:
    if isinstance(obj, float):
        raise SchemaError(f"float in {where}; store it as a string")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_float_free(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_float_free(v, f"{where}[{i}]")


def document_from_dict(d: dict, n: Optional[int] = None) -> ResultsDocument:
    if not isinstance(d, dict):
        raise SchemaError("results JSON must be an object")
    missing = [k for k in REQUIRED if k not in d]
    if missing:
        raise SchemaError(f"missing required fields: {', '.join(missing)}")
    counts = d["counts"]
    if not isinstance(counts, dict) or not counts:
        raise SchemaError("counts must be a non-empty object")
    widths = {len(k) for k in counts}
    if len(widths) != 1:
        raise SchemaError(f"counts keys have mixed widths {sorted(widths)}")
    (width,) = widths
    if width % 2 or (n is not None and width != 2 * n):
        expected = "an even width" if n is None else f"width {2 * n}"
        raise SchemaError(f"counts keys have width {width}, expected {expected}")
    for key, v in counts.items():
        if set(key) - {"0", "1"}:
            raise SchemaError(f"non-binary counts key {key!r}")
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            raise SchemaError(f"count for {key!r} must be a positive integer")
    if not isinstance(d["shots"], int):
        raise SchemaError("shots must be an integer")
    ext = d.get("extensions")
    if ext is not None:
        _check_float_free(ext)
    return ResultsDocument(
        experiment=str(d["experiment"]),
        backend=str(d["backend"]),
        physical_qubits=list(d["physical_qubits"]),
        shots=d["shots"],
        counts=dict(counts),
        extensions=ext,
    )


def loads(text: str, n: Optional[int] = None) -> ResultsDocument:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return document_from_dict(d, n)


def load(path: str | Path, n: Optional[int] = None) -> ResultsDocument:
    return loads(Path(path).read_text(encoding="utf-8"), n)


def save(doc: ResultsDocument, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc.dumps(), encoding="utf-8")
    return path
