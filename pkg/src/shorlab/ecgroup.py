"""Toy elliptic-curve groups over F_p and the point <-> index encoding.

Points are plain tuples ``(x, y)``; the point at infinity is ``None``
(aliased as :data:`INFINITY`). Everything here is exact integer arithmetic
and small enough to enumerate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Tuple

Point = Optional[Tuple[int, int]]
INFINITY: Point = None


class NoSuchSubgroup(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


class NotInSubgroup(ValueError):
    pass


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class CurveParams:
    """Short Weierstrass curve y^2 = x^3 + a*x + b over F_p."""

    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3 or not _is_prime(self.p):
            raise ValueError(f"p must be a prime > 3, got {self.p}")
        if (4 * self.a**3 + 27 * self.b**2) % self.p == 0:
            raise ValueError(f"singular curve: a={self.a}, b={self.b} mod {self.p}")

    def contains(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - (x * x * x + self.a * x + self.b)) % self.p == 0

    def points(self) -> list[Point]:
        """All curve points, infinity first, then ascending (x, y)."""
        p = self.p
        roots: dict[int, list[int]] = {}
        for y in range(p):
            roots.setdefault(y * y % p, []).append(y)
        pts: list[Point] = [INFINITY]
        for x in range(p):
            rhs = (x * x * x + self.a * x + self.b) % p
            pts.extend((x, y) for y in roots.get(rhs, ()))
        return pts


def _inv_mod(v: int, m: int) -> int:
    # Extended Euclid; callers guarantee gcd(v, m) == 1.
    r0, r1 = v % m, m
    s0, s1 = 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise ZeroDivisionError(f"{v} is not invertible mod {m}")
    return s0 % m


def point_neg(curve: CurveParams, P: Point) -> Point:
    if P is None:
        return None
    return (P[0], -P[1] % curve.p)


def point_add(curve: CurveParams, P1: Point, P2: Point) -> Point:
    """Affine chord-and-tangent addition."""
    if P1 is None:
        return P2
    if P2 is None:
        return P1
    p = curve.p
    x1, y1 = P1
    x2, y2 = P2
    if x1 == x2 and (y1 + y2) % p == 0:
        return INFINITY
    if x1 == x2:
        slope = (3 * x1 * x1 + curve.a) * _inv_mod(2 * y1, p) % p
    else:
        slope = (y2 - y1) * _inv_mod(x2 - x1, p) % p
    x3 = (slope * slope - x1 - x2) % p
    y3 = (slope * (x1 - x3) - y1) % p
    return (x3, y3)


def scalar_mul(curve: CurveParams, k: int, P: Point) -> Point:
    """Double-and-add; ``k`` must be non-negative."""
    if k < 0:
        raise ValueError("scalar must be non-negative")
    result: Point = INFINITY
    addend = P
    while k:
        if k & 1:
            result = point_add(curve, result, addend)
        addend = point_add(curve, addend, addend)
        k >>= 1
    return result


def point_order(curve: CurveParams, P: Point) -> int:
    order = 1
    Q = P
    while Q is not None:
        Q = point_add(curve, Q, P)
        order += 1
    return order


def _has_exact_order(curve: CurveParams, P: Point, N: int) -> bool:
    # N is a power of two, so checking N*P == O and (N/2)*P != O suffices.
    if N == 1:
        return P is None
    return scalar_mul(curve, N, P) is None and scalar_mul(curve, N // 2, P) is not None


def find_generator_of_order(curve: CurveParams, N: int) -> Point:
    """Smallest (x, then y) point of exact order ``N`` (a power of two)."""
    if N < 1 or N & (N - 1):
        raise ValueError(f"N must be a power of two, got {N}")
    if N == 1:
        return INFINITY
    for P in curve.points()[1:]:
        if _has_exact_order(curve, P, N):
            return P
    raise NoSuchSubgroup(f"no point of order {N} on {curve}")


@dataclass(frozen=True)
class SubgroupEncoding:
    """Isomorphism <P> -> (Z_N, +) sending x*P to x."""

    curve: CurveParams
    generator: Point
    order: int
    table: tuple[Point, ...]

    @cached_property
    def index_of(self) -> dict[Point, int]:
        return {pt: i for i, pt in enumerate(self.table)}

    def point(self, index: int) -> Point:
        return self.table[index % self.order]


def build_encoding(curve: CurveParams, generator: Point, N: int) -> SubgroupEncoding:
    if not curve.contains(generator):
        raise ValueError(f"{generator} is not on {curve}")
    if not _has_exact_order(curve, generator, N):
        raise OrderMismatch(
            f"generator {generator} has order {point_order(curve, generator)}, expected {N}"
        )
    table: list[Point] = [INFINITY]
    for _ in range(N - 1):
        table.append(point_add(curve, table[-1], generator))
    return SubgroupEncoding(curve=curve, generator=generator, order=N, table=tuple(table))


def discrete_log_bruteforce(encoding: SubgroupEncoding, Q: Point) -> int:
    try:
        return encoding.index_of[Q]
    except KeyError:
        raise NotInSubgroup(f"{Q} is not in the subgroup generated by {encoding.generator}") from None


def search_default_curve(N: int = 32, max_p: int = 10_000) -> tuple[CurveParams, Point]:
    """First (p, a, b) in ascending order with a point of exact order ``N``.

    Primes are scanned upward; within a prime, ``a`` then ``b`` ascend.
    """
    for p in range(5, max_p):
        if not _is_prime(p):
            continue
        # Hasse bound: #E <= p + 1 + 2*sqrt(p); skip primes that cannot reach N.
        if p + 1 + 2 * p**0.5 < N:
            continue
        for a in range(p):
            for b in range(p):
                if (4 * a**3 + 27 * b**2) % p == 0:
                    continue
                curve = CurveParams(p, a, b)
                try:
                    return curve, find_generator_of_order(curve, N)
                except NoSuchSubgroup:
                    continue
    raise NoSuchSubgroup(f"no curve with p < {max_p} has a point of order {N}")


def curve_to_json(curve: CurveParams, generator: Point, order: int) -> str:
    doc = {"p": curve.p, "a": curve.a, "b": curve.b, "generator": list(generator), "order": order}
    return json.dumps(doc, indent=4, sort_keys=True) + "\n"


def load_curve_fixture(path: str | Path | None = None) -> SubgroupEncoding:
    """Load a curve fixture JSON; defaults to the bundled order-32 curve."""
    if path is None:
        text = resources.files("shorlab").joinpath("data/default_curve.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    curve = CurveParams(int(doc["p"]), int(doc["a"]), int(doc["b"]))
    gx, gy = doc["generator"]
    return build_encoding(curve, (int(gx), int(gy)), int(doc["order"]))


@lru_cache(maxsize=None)
def default_encoding(n: int = 5) -> SubgroupEncoding:
    """Encoding for a 2^n-element subgroup.

    n=5 uses the bundled fixture; other widths fall back to the same
    deterministic search.
    """
    N = 1 << n
    if N == 32:
        return load_curve_fixture()
    curve, gen = search_default_curve(N)
    return build_encoding(curve, gen, N)


@dataclass(frozen=True)
class EcdlpInstance:
    """Indices of P and Q inside Z_N.

    ``consistent`` instances satisfy q_index == secret_k * p_index mod N.
    Paper-compat instances carry q_index verbatim and make no such promise.
    """

    encoding: SubgroupEncoding
    p_index: int
    q_index: int
    secret_k: Optional[int] = None
    consistent: bool = True

    def __post_init__(self):
        N = self.encoding.order
        if not (0 <= self.p_index < N and 0 <= self.q_index < N):
            raise ValueError(f"indices must lie in [0, {N})")
        if self.consistent and self.secret_k is not None:
            if self.q_index != (self.secret_k * self.p_index) % N:
                raise ValueError("q_index != secret_k * p_index mod N")

    @classmethod
    def from_secret(cls, encoding: SubgroupEncoding, k: int, p_index: int = 1) -> "EcdlpInstance":
        # Q is computed classically as a curve point, then mapped to its index.
        P = encoding.point(p_index)
        Q = scalar_mul(encoding.curve, k % encoding.order, P)
        q_index = discrete_log_bruteforce(encoding, Q)
        return cls(encoding, p_index, q_index, secret_k=k % encoding.order, consistent=True)

    @classmethod
    def paper_compat(
        cls, encoding: SubgroupEncoding, q_index: int, p_index: int = 1, secret_k: Optional[int] = None
    ) -> "EcdlpInstance":
        return cls(encoding, p_index, q_index, secret_k=secret_k, consistent=False)

    @property
    def P(self) -> Point:
        return self.encoding.point(self.p_index)

    @property
    def Q(self) -> Point:
        return self.encoding.point(self.q_index)
