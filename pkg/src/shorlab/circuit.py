"""Register-level circuit IR and the Shor-ECDLP circuit builder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

from .conventions import ConventionConfig

Register = Literal["a", "b", "p"]


@dataclass(frozen=True)
class RegisterLayout:
    """Three contiguous n-qubit registers a, b, p (in that order) and 2n clbits."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("register width must be >= 1")

    @property
    def n_qubits(self) -> int:
        return 3 * self.n

    @property
    def n_clbits(self) -> int:
        return 2 * self.n

    @property
    def N(self) -> int:
        return 1 << self.n

    def qubits(self, reg: Register) -> range:
        start = {"a": 0, "b": 1, "p": 2}[reg] * self.n
        return range(start, start + self.n)


@dataclass(frozen=True)
class HadamardAll:
    register: Register


@dataclass(frozen=True)
class ControlledAddConst:
    """|x> -> |x + c mod 2^n> on ``target`` when qubit ``control`` is 1."""

    control: int
    target: Register
    c: int


@dataclass(frozen=True)
class QftOnRegister:
    register: Register
    include_final_swaps: bool = False
    exponent_sign: int = 1


@dataclass(frozen=True)
class Barrier:
    pass


@dataclass(frozen=True)
class MeasureRegister:
    register: Register
    classical_offset: int


Gate = Union[HadamardAll, ControlledAddConst, QftOnRegister, Barrier, MeasureRegister]


@dataclass(frozen=True)
class Circuit:
    layout: RegisterLayout
    gates: tuple[Gate, ...]
    name: str = ""

    def __post_init__(self):
        n, nq = self.layout.n, self.layout.n_qubits
        seen_measure = False
        for g in self.gates:
            if isinstance(g, ControlledAddConst):
                if not 0 <= g.control < nq:
                    raise ValueError(f"control qubit {g.control} out of range")
                if not 1 <= g.c < self.layout.N:
                    raise ValueError(f"adder constant {g.c} out of range")
                if g.control in self.layout.qubits(g.target):
                    raise ValueError("control qubit inside target register")
            if isinstance(g, MeasureRegister):
                seen_measure = True
                if not 0 <= g.classical_offset <= self.layout.n_clbits - n:
                    raise ValueError("measurement overruns classical register")
            elif seen_measure:
                raise ValueError("gates after measurement are not supported")

    def oracle_gates(self) -> list[ControlledAddConst]:
        return [g for g in self.gates if isinstance(g, ControlledAddConst)]

    def dump(self) -> str:
        """One gate per line, e.g. ``CADD c=14 ctrl=b[1]``."""
        lines = []
        for g in self.gates:
            if isinstance(g, HadamardAll):
                lines.append(f"H {g.register}")
            elif isinstance(g, ControlledAddConst):
                reg, bit = _locate(self.layout, g.control)
                lines.append(f"CADD c={g.c} ctrl={reg}[{bit}]")
            elif isinstance(g, QftOnRegister):
                swap = "swap" if g.include_final_swaps else "noswap"
                sign = "" if g.exponent_sign == 1 else " inv"
                lines.append(f"QFT {g.register} {swap}{sign}")
            elif isinstance(g, Barrier):
                lines.append("BARRIER")
            elif isinstance(g, MeasureRegister):
                lo = g.classical_offset
                lines.append(f"M {g.register}→c[{lo}..{lo + self.layout.n})")
        return "\n".join(lines) + "\n"


def _locate(layout: RegisterLayout, qubit: int) -> tuple[str, int]:
    for reg in ("a", "b", "p"):
        if qubit in layout.qubits(reg):
            return reg, qubit - layout.qubits(reg).start
    raise ValueError(qubit)


def add_const_permutation(c: int, n: int) -> list[int]:
    """Index map of |x> -> |x + c mod 2^n>: ``perm[x]`` is the image of x."""
    N = 1 << n
    if not 0 <= c < N:
        raise ValueError(f"constant {c} outside [0, {N})")
    return [(x + c) % N for x in range(N)]


def build_oracle(layout: RegisterLayout, p_index: int, q_index: int) -> list[ControlledAddConst]:
    """Controlled adders computing p += a*p_index + b*q_index (mod 2^n).

    Bit i of ``a`` adds (p_index * 2^i) mod 2^n; zero constants are dropped.
    """
    N = layout.N
    gates = []
    for reg, idx in (("a", p_index), ("b", q_index)):
        for i, qubit in enumerate(layout.qubits(reg)):
            c = (idx << i) % N
            if c:
                gates.append(ControlledAddConst(control=qubit, target="p", c=c))
    return gates


def build_shor_circuit(
    n: int, p_index: int, q_index: int, conventions: ConventionConfig | None = None
) -> Circuit:
    if not 1 <= n <= 8:
        raise ValueError(f"n must be in [1, 8], got {n}")
    conv = conventions or ConventionConfig()
    layout = RegisterLayout(n)
    N = layout.N
    if not (0 <= p_index < N and 0 <= q_index < N):
        raise ValueError(f"indices must lie in [0, {N})")
    gates: list[Gate] = [HadamardAll("a"), HadamardAll("b")]
    gates += build_oracle(layout, p_index, q_index)
    gates.append(Barrier())
    gates.append(QftOnRegister("a", conv.qft_final_swaps, conv.qft_sign_a))
    gates.append(QftOnRegister("b", conv.qft_final_swaps, conv.qft_sign_b))
    gates.append(MeasureRegister("a", 0))
    gates.append(MeasureRegister("b", n))
    return Circuit(layout, tuple(gates), name=f"ECDLP_{N}pts")
