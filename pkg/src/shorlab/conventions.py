"""Bit-order and Fourier-sign conventions that connect circuit to decoder.

A measured outcome passes through several independent choices before it
becomes an ``(a, b)`` pair: whether the QFT ends with qubit swaps, the sign
of each register's Fourier exponent, how the classical register is rendered
as a string, which half of that string is read as ``a``, and whether each
half is bit-reversed before integer conversion. Getting any of them wrong
silently moves the interference ridge, so they are all explicit here.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, replace
from typing import Iterator, Literal

HalvesOrder = Literal["b-high", "a-high"]
RenderOrder = Literal["classical-msb-first"]


@dataclass(frozen=True)
class ConventionConfig:
    """Measurement and parsing conventions.

    ``register_halves_order`` names what sits in the first ``n`` characters
    of the rendered bitstring *as far as the parser is concerned*: with
    ``"b-high"`` the parser reads ``b`` from the leading half (which is where
    the b register is physically measured), with ``"a-high"`` it reads ``a``
    from there instead.
    """

    qft_final_swaps: bool = False
    qft_sign_a: int = 1
    qft_sign_b: int = -1
    bitstring_render_order: RenderOrder = "classical-msb-first"
    register_halves_order: HalvesOrder = "a-high"
    postparse_endian_flip: bool = True

    def __post_init__(self):
        if self.qft_sign_a not in (1, -1) or self.qft_sign_b not in (1, -1):
            raise ValueError("QFT exponent signs must be +1 or -1")
        if self.register_halves_order not in ("b-high", "a-high"):
            raise ValueError(f"bad halves order {self.register_halves_order!r}")
        if self.bitstring_render_order != "classical-msb-first":
            raise ValueError(f"bad render order {self.bitstring_render_order!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ConventionConfig":
        return cls(**d)

    def with_main_script_halves(self) -> "ConventionConfig":
        return replace(self, register_halves_order="b-high")


def convention_space(shared_sign_only: bool = False) -> Iterator[ConventionConfig]:
    """Every configuration, reference settings first.

    With ``shared_sign_only`` both registers get the same Fourier sign,
    which is the narrower space a single global exponent sign describes.
    """
    for swaps, flip, halves, sign_a, sign_b in itertools.product(
        (False, True), (True, False), ("b-high", "a-high"), (1, -1), (1, -1)
    ):
        if shared_sign_only and sign_a != sign_b:
            continue
        yield ConventionConfig(
            qft_final_swaps=swaps,
            qft_sign_a=sign_a,
            qft_sign_b=sign_b,
            register_halves_order=halves,
            postparse_endian_flip=flip,
        )


# Same-sign QFTs with the main-script parse: what the hardware script ran.
PAPER_LITERAL = ConventionConfig(qft_sign_a=1, qft_sign_b=1, register_halves_order="b-high")


class MalformedBitstring(ValueError):
    pass


def render_bitstring(a_reg: int, b_reg: int, n: int) -> str:
    """Classical register c[2n-1]...c[0] as text; a sits in c[0:n), b in c[n:2n)."""
    return format(b_reg, f"0{n}b") + format(a_reg, f"0{n}b")


def parse_bitstring(bits: str, n: int, conv: ConventionConfig) -> tuple[int, int]:
    if len(bits) != 2 * n or set(bits) - {"0", "1"}:
        raise MalformedBitstring(f"expected {2 * n} binary characters, got {bits!r}")
    lead, trail = bits[:n], bits[n:]
    if conv.register_halves_order == "b-high":
        a_bits, b_bits = trail, lead
    else:
        a_bits, b_bits = lead, trail
    if conv.postparse_endian_flip:
        a_bits, b_bits = a_bits[::-1], b_bits[::-1]
    return int(a_bits, 2), int(b_bits, 2)


def decode_pair(a_reg: int, b_reg: int, n: int, conv: ConventionConfig) -> tuple[int, int]:
    """Measured register values -> the (a, b) pair the post-processor sees."""
    return parse_bitstring(render_bitstring(a_reg, b_reg, n), n, conv)
