"""Classical key recovery from measured (a, b) pairs: k = -a * b^-1 mod N."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional

from .conventions import ConventionConfig, MalformedBitstring, parse_bitstring
from .simulator import Counts

__all__ = [
    "AbPair",
    "Candidate",
    "CandidateTable",
    "MalformedBitstring",
    "NotInvertible",
    "aggregate_k_histogram",
    "extract_candidates",
    "format_report",
    "mod_inverse",
    "parse_counts",
    "recover_k",
    "success_check",
]


class NotInvertible(ValueError):
    pass


@dataclass(frozen=True, order=True)
class AbPair:
    a: int
    b: int
    count: int


@dataclass(frozen=True)
class Candidate:
    pair: AbPair
    k: int


@dataclass(frozen=True)
class CandidateTable:
    candidates: tuple[Candidate, ...]
    top_n: int
    N: int

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def to_csv(self, k_target: Optional[int] = None) -> str:
        lines = ["rank,a,b,k,count,is_target"]
        for rank, c in enumerate(self.candidates, 1):
            hit = int(k_target is not None and c.k == k_target)
            lines.append(f"{rank},{c.pair.a},{c.pair.b},{c.k},{c.pair.count},{hit}")
        return "\n".join(lines) + "\n"


def mod_inverse(b: int, N: int) -> int:
    if N < 2:
        raise ValueError("modulus must be >= 2")
    if gcd(b, N) != 1:
        raise NotInvertible(f"{b} has no inverse mod {N}")
    return pow(b, -1, N)


def recover_k(a: int, b: int, N: int) -> int:
    return (-a * mod_inverse(b, N)) % N


def parse_counts(counts: Counts, n: int, conventions: ConventionConfig) -> list[AbPair]:
    """Bitstring histogram -> (a, b) pairs, merging keys that parse alike.

    Returned in ascending (a, b) order.
    """
    merged: dict[tuple[int, int], int] = defaultdict(int)
    for bits, v in counts.counts.items():
        merged[parse_bitstring(bits, n, conventions)] += v
    return [AbPair(a, b, v) for (a, b), v in sorted(merged.items())]


def _rank_key(pair: AbPair):
    return (-pair.count, pair.a, pair.b)


def extract_candidates(pairs: Iterable[AbPair], N: int, top_n: int = 100) -> CandidateTable:
    """Top ``top_n`` invertible pairs by count; ties go to smaller (a, b)."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    out = []
    for pair in sorted(pairs, key=_rank_key):
        if gcd(pair.b, N) != 1:
            continue
        out.append(Candidate(pair, recover_k(pair.a, pair.b, N)))
        if len(out) == top_n:
            break
    return CandidateTable(tuple(out), top_n, N)


def aggregate_k_histogram(pairs: Iterable[AbPair], N: int) -> list[int]:
    """Total count per recovered k (index = k); non-invertible b dropped."""
    hist = [0] * N
    for pair in pairs:
        if gcd(pair.b, N) == 1:
            hist[recover_k(pair.a, pair.b, N)] += pair.count
    return hist


def success_check(table: CandidateTable, k_true: int) -> tuple[bool, Optional[int]]:
    """(hit, 1-based rank of the first candidate with k == k_true)."""
    for rank, c in enumerate(table.candidates, 1):
        if c.k == k_true:
            return True, rank
    return False, None


def format_report(table: CandidateTable, k_true: Optional[int]) -> str:
    lines = []
    if k_true is not None:
        hit, _ = success_check(table, k_true)
        if hit:
            lines.append(f"SUCCESS — k = {k_true} found in top {table.top_n} results")
        else:
            lines.append(f"WARNING — k = {k_true} NOT found in top {table.top_n} results")
        lines.append("")
    lines.append(f"Top {table.top_n} invertible (a, b) pairs and recovered k:")
    for c in table.candidates:
        tag = " <<<" if c.k == k_true else ""
        lines.append(f" (a={c.pair.a:2}, b={c.pair.b:2}) → k = {c.k:2} (count = {c.pair.count}){tag}")
    return "\n".join(lines) + "\n"
