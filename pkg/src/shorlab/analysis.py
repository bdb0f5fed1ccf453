"""Figure datasets and ridge metrics computed from decoded (a, b) counts.

Every figure is plain data: a grid (N x N array) or a table of rows. Nothing
here draws; :func:`write_figures` emits one CSV per figure plus a manifest.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .postprocess import AbPair, aggregate_k_histogram, mod_inverse, recover_k

Kind = Literal["grid", "series", "bar", "scatter"]
Orientation = Literal["ab", "ba"]


@dataclass(frozen=True)
class FigureDataset:
    name: str
    title: str
    kind: Kind
    axes: tuple[str, ...]
    grid: Optional[np.ndarray] = None
    rows: tuple[tuple, ...] = ()

    def to_csv(self) -> str:
        lines = [",".join(self.axes)]
        if self.kind == "grid":
            N = self.grid.shape[0]
            for i in range(N):
                for j in range(N):
                    lines.append(f"{i},{j},{_fmt(self.grid[i, j])}")
        else:
            lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def manifest_entry(self, source_run: str) -> dict:
        return {
            "name": self.name,
            "title": self.title,
            "kind": self.kind,
            "axes": list(self.axes),
            "file": f"{self.name}.csv",
            "source_run": source_run,
        }


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    f = float(v)
    if f.is_integer():
        return str(int(f))
    return repr(f)


@dataclass(frozen=True)
class RidgeMetrics:
    on_ridge_mass: float
    invertible_mass: float
    top_k: tuple[tuple[int, int], ...]
    zipf_series: tuple[int, ...] = field(repr=False)


def _counts_grid(pairs: Iterable[AbPair], N: int, invertible_only: bool = False) -> np.ndarray:
    grid = np.zeros((N, N), dtype=np.int64)
    for p in pairs:
        if invertible_only and gcd(p.b, N) != 1:
            continue
        grid[p.a, p.b] += p.count
    return grid


def heatmap_grid(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    return FigureDataset(
        "raw_count_heatmap", "Raw Count Heatmap (a vs b)", "grid", ("a", "b", "count"),
        grid=_counts_grid(pairs, N),
    )


def invertible_heatmap(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    return FigureDataset(
        "invertible_heatmap", f"Heatmap: (a, b) with Invertible b (mod {N})", "grid",
        ("a", "b", "count"), grid=_counts_grid(pairs, N, invertible_only=True),
    )


def ridge_mask(k: int, N: int, orientation: Orientation = "ab") -> set[tuple[int, int]]:
    """Pairs on the ridge: a + k*b == 0 ("ab") or b + k*a == 0 ("ba") mod N."""
    if orientation == "ab":
        return {((-k * b) % N, b) for b in range(N)}
    if orientation == "ba":
        return {(a, (-k * a) % N) for a in range(N)}
    raise ValueError(f"unknown orientation {orientation!r}")


def residue_map(k: int, N: int) -> FigureDataset:
    a = np.arange(N)[:, None]
    b = np.arange(N)[None, :]
    return FigureDataset(
        "residue_map", f"Residue Map of a + {k}b mod {N}", "grid", ("a", "b", "residue"),
        grid=(a + k * b) % N,
    )


def efficiency_split(pairs: Iterable[AbPair], N: int) -> tuple[int, int]:
    inv = non = 0
    for p in pairs:
        if gcd(p.b, N) == 1:
            inv += p.count
        else:
            non += p.count
    return inv, non


def efficiency_figure(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    inv, non = efficiency_split(pairs, N)
    return FigureDataset(
        "attack_efficiency", "ECC Attack Efficiency: Valid vs Invalid b", "bar",
        ("category", "count"), rows=(("invertible_b", inv), ("non_invertible_b", non)),
    )


def ridge_angle_histogram(pairs: Iterable[AbPair], N: int, bin_width: float = 0.01) -> FigureDataset:
    """Count-weighted histogram of atan2((-a) mod N, b) mod pi over invertible b."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    bins: Counter[int] = Counter()
    for p in pairs:
        if gcd(p.b, N) != 1:
            continue
        angle = math.atan2((-p.a) % N, p.b) % math.pi
        bins[round(angle / bin_width)] += p.count
    rows = tuple((round(i * bin_width, 12), bins[i]) for i in sorted(bins))
    return FigureDataset(
        "ridge_angle_histogram", "Distribution of Phase Ridge Angles", "bar",
        ("angle_rad", "count"), rows=rows,
    )


def variance_per_a(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    """Population variance of each row of the count grid (absent cells are 0)."""
    grid = _counts_grid(pairs, N).astype(float)
    var = grid.var(axis=1)
    return FigureDataset(
        "count_variance_per_a", "Noise: Variance of Count across b for fixed a", "series",
        ("a", "variance"), rows=tuple((a, float(var[a])) for a in range(N)),
    )


def rank_count_series(pairs: Iterable[AbPair]) -> FigureDataset:
    counts = sorted((p.count for p in pairs), reverse=True)
    return FigureDataset(
        "bitstring_rank_vs_count", "Bitstring Rank vs. Count", "series", ("rank", "count"),
        rows=tuple(enumerate(counts)),
    )


def k_histogram_figure(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    hist = aggregate_k_histogram(pairs, N)
    return FigureDataset(
        "recovered_k_histogram", "Histogram of Recovered k Values", "bar", ("k", "count"),
        rows=tuple(enumerate(hist)),
    )


def k_locations(pairs: Iterable[AbPair], N: int, k: int) -> FigureDataset:
    rows = tuple(
        (p.a, p.b, p.count)
        for p in sorted(pairs)
        if gcd(p.b, N) == 1 and recover_k(p.a, p.b, N) == k
    )
    return FigureDataset(
        "k_target_locations", f"Locations of (a, b) Decoding to k = {k}", "scatter",
        ("a", "b", "count"), rows=rows,
    )


def invertibility_mask(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    totals = [0] * N
    for p in pairs:
        if gcd(p.b, N) == 1:
            totals[p.b] += p.count
    return FigureDataset(
        "invertibility_mask", "Invertibility Mask for b Register", "bar", ("b", "count"),
        rows=tuple(enumerate(totals)),
    )


def modular_inverse_map(pairs: Iterable[AbPair], N: int) -> FigureDataset:
    grid = np.zeros((N, N), dtype=np.int64)
    for p in pairs:
        if gcd(p.b, N) == 1:
            grid[p.b, mod_inverse(p.b, N)] += p.count
    return FigureDataset(
        "modular_inverse_frequency_map", f"Modular Inverse Frequency Map: b vs b^-1 (mod {N})",
        "grid", ("b", "b_inv", "count"), grid=grid,
    )


def akb_map(pairs: Iterable[AbPair], N: int, k: int) -> FigureDataset:
    totals = [0] * N
    for p in pairs:
        totals[(p.a + k * p.b) % N] += p.count
    return FigureDataset(
        "akb_map", f"a + {k}·b mod {N} Map", "bar", ("residue", "count"),
        rows=tuple(enumerate(totals)),
    )


def all_figures(pairs: Sequence[AbPair], N: int, k_target: int, bin_width: float = 0.01) -> list[FigureDataset]:
    """The twelve result figures, in a fixed order."""
    pairs = list(pairs)
    return [
        heatmap_grid(pairs, N),
        k_histogram_figure(pairs, N),
        rank_count_series(pairs),
        k_locations(pairs, N, k_target),
        invertibility_mask(pairs, N),
        modular_inverse_map(pairs, N),
        akb_map(pairs, N, k_target),
        efficiency_figure(pairs, N),
        invertible_heatmap(pairs, N),
        ridge_angle_histogram(pairs, N, bin_width),
        residue_map(k_target, N),
        variance_per_a(pairs, N),
    ]


def ridge_metrics(pairs: Sequence[AbPair], N: int, k: int, orientation: Orientation = "ab") -> RidgeMetrics:
    total = sum(p.count for p in pairs)
    mask = ridge_mask(k, N, orientation)
    on_ridge = sum(p.count for p in pairs if (p.a, p.b) in mask)
    inv, _ = efficiency_split(pairs, N)
    hist = aggregate_k_histogram(pairs, N)
    top_k = tuple(sorted(((kk, c) for kk, c in enumerate(hist) if c), key=lambda t: (-t[1], t[0])))
    zipf = tuple(sorted((p.count for p in pairs), reverse=True))
    return RidgeMetrics(
        on_ridge_mass=on_ridge / total if total else 0.0,
        invertible_mass=inv / total if total else 0.0,
        top_k=top_k,
        zipf_series=zipf,
    )


def write_figures(figures: Iterable[FigureDataset], out_dir: str | Path, source_run: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for fig in figures:
        (out / f"{fig.name}.csv").write_text(fig.to_csv())
        entries.append(fig.manifest_entry(source_run))
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"figures": entries}, indent=4, sort_keys=True) + "\n")
    return manifest
