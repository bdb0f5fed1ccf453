"""Dense statevector simulation of the Shor-ECDLP circuit.

Qubit ``q`` carries weight ``2**q`` in the amplitude index (little-endian,
as on the hardware the circuit targets), so with registers a, b, p laid out
contiguously the flat vector reshapes to an ``(N, N, N)`` tensor indexed
``[p, b, a]``. Register-wide operators act on one axis of that tensor;
controlled adders are index permutations and never build a matrix.

Outcome distributions are indexed ``[a_reg, b_reg]`` by the integer values
the registers hold at measurement time. Turning those into the ``(a, b)``
pairs used for key recovery is a parsing step, see
:func:`shorlab.conventions.decode_pair` and :func:`decode_distribution`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping

import numpy as np

from .circuit import (
    Barrier,
    Circuit,
    ControlledAddConst,
    Gate,
    HadamardAll,
    MeasureRegister,
    QftOnRegister,
    RegisterLayout,
    build_shor_circuit,
)
from .conventions import ConventionConfig, convention_space, decode_pair, render_bitstring

NORM_TOL = 1e-12
ANALYTIC_TOL = 1e-10
SUPPORT_TOL = 1e-9

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


class WidthMismatch(ValueError):
    pass


class NoConsistentConvention(RuntimeError):
    pass


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class OutcomeDistribution:
    n: int
    probs: np.ndarray  # shape (N, N), indexed [a, b]

    def __post_init__(self):
        N = 1 << self.n
        if self.probs.shape != (N, N):
            raise ValueError(f"expected shape {(N, N)}, got {self.probs.shape}")

    @property
    def N(self) -> int:
        return 1 << self.n

    def support(self, tol: float = SUPPORT_TOL) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in zip(*np.nonzero(self.probs > tol))}

    def items(self):
        """(a, b, probability) in ascending (a, b) order."""
        N = self.N
        for a in range(N):
            for b in range(N):
                yield a, b, float(self.probs[a, b])


@dataclass(frozen=True)
class Counts:
    shots: int
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")
        widths = {len(k) for k in self.counts}
        if len(widths) > 1:
            raise ValueError("bitstring keys have mixed widths")
        if any(v <= 0 for v in self.counts.values()):
            raise ValueError("counts must be positive")


# --- gate kernels -----------------------------------------------------------


@lru_cache(maxsize=64)
def _bit_reverse_table(n: int) -> np.ndarray:
    return np.array([int(format(x, f"0{n}b")[::-1], 2) for x in range(1 << n)])


@lru_cache(maxsize=64)
def qft_matrix(n: int, swaps: bool, sign: int) -> np.ndarray:
    """n-qubit Fourier matrix on little-endian register values.

    With swaps: |x> -> N^-1/2 sum_y exp(sign*2*pi*i*x*y/N) |y>. Without the
    final swaps the output lands bit-reversed, |y> becomes |rev(y)>.
    """
    N = 1 << n
    xy = np.outer(np.arange(N), np.arange(N)) % N
    F = np.exp(sign * 2j * np.pi * xy / N) / np.sqrt(N)  # F[y, x]
    if not swaps:
        out = np.empty_like(F)
        out[_bit_reverse_table(n)] = F
        F = out
    return F


_AXIS = {"a": 2, "b": 1, "p": 0}


def _apply_register_matrix(tensor: np.ndarray, M: np.ndarray, reg: str) -> np.ndarray:
    axis = _AXIS[reg]
    moved = np.moveaxis(tensor, axis, -1)
    return np.moveaxis(moved @ M.T, -1, axis)


def _apply_hadamard(amps: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    # Axis of qubit q in a C-order [2]*n reshape is n-1-q.
    t = amps.reshape((2,) * n_qubits)
    axis = n_qubits - 1 - qubit
    t = np.moveaxis(np.tensordot(_H, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


@lru_cache(maxsize=256)
def _cadd_source_index(layout: RegisterLayout, control: int, target: str, c: int) -> np.ndarray:
    """``src`` such that new[i] = old[src[i]] for a controlled +c."""
    idx = np.arange(1 << layout.n_qubits)
    start = layout.qubits(target).start
    mask = layout.N - 1
    t = (idx >> start) & mask
    ctrl = (idx >> control) & 1
    shifted = (t - c * ctrl) % layout.N
    return (idx & ~(mask << start)) | (shifted << start)


def apply_gate(state: StateVector, gate: Gate, layout: RegisterLayout) -> StateVector:
    if state.n_qubits != layout.n_qubits:
        raise WidthMismatch(f"state has {state.n_qubits} qubits, layout {layout.n_qubits}")
    amps = state.amplitudes
    N = layout.N
    if isinstance(gate, HadamardAll):
        for q in layout.qubits(gate.register):
            amps = _apply_hadamard(amps, layout.n_qubits, q)
    elif isinstance(gate, ControlledAddConst):
        amps = amps[_cadd_source_index(layout, gate.control, gate.target, gate.c)]
    elif isinstance(gate, QftOnRegister):
        M = qft_matrix(layout.n, gate.include_final_swaps, gate.exponent_sign)
        t = _apply_register_matrix(amps.reshape(N, N, N), M, gate.register)
        amps = np.ascontiguousarray(t).reshape(-1)
    elif isinstance(gate, (Barrier, MeasureRegister)):
        return state
    else:
        raise TypeError(f"unknown gate {gate!r}")
    return StateVector(state.n_qubits, amps)


def run_statevector(circuit: Circuit, gates: Iterable[Gate] | None = None) -> StateVector:
    state = StateVector.zero(circuit.layout.n_qubits)
    for g in circuit.gates if gates is None else gates:
        state = apply_gate(state, g, circuit.layout)
    return state


def joint_probabilities(state: StateVector, layout: RegisterLayout) -> np.ndarray:
    """|amp|^2 as an (N, N, N) array indexed [a, b, p]."""
    N = layout.N
    return np.transpose(np.abs(state.amplitudes.reshape(N, N, N)) ** 2, (2, 1, 0))


def run_exact(circuit: Circuit) -> OutcomeDistribution:
    """Exact distribution over (a_reg, b_reg) with the point register summed out."""
    state = run_statevector(circuit)
    probs = joint_probabilities(state, circuit.layout).sum(axis=2)
    return OutcomeDistribution(circuit.layout.n, probs)


def analytic_distribution(
    n: int, k_eff: int, conventions: ConventionConfig | None = None, p_index: int = 1
) -> OutcomeDistribution:
    """Closed-form ridge for an oracle computing a*p_index + b*k_eff.

    The Fourier-domain support is the cyclic subgroup generated by
    (sign_a*p_index, sign_b*k_eff), uniform over its N/gcd(p_index, k_eff, N)
    elements; swap-free QFTs then bit-reverse each register value.
    """
    if not 1 <= n <= 16:
        raise ValueError("n must be in [1, 16]")
    conv = conventions or ConventionConfig()
    N = 1 << n
    gu = (conv.qft_sign_a * p_index) % N
    gv = (conv.qft_sign_b * k_eff) % N
    t = np.arange(N)
    u, v = (t * gu) % N, (t * gv) % N
    if not conv.qft_final_swaps:
        rev = _bit_reverse_table(n)
        u, v = rev[u], rev[v]
    probs = np.zeros((N, N))
    size = N // gcd(gcd(p_index, k_eff), N)
    probs[u, v] = 1.0 / size
    return OutcomeDistribution(n, probs)


def decode_distribution(dist: OutcomeDistribution, conventions: ConventionConfig) -> OutcomeDistribution:
    """Re-index a register-valued distribution by decoded (a, b)."""
    N = dist.N
    out = np.zeros_like(dist.probs)
    for a_reg in range(N):
        for b_reg in range(N):
            a, b = decode_pair(a_reg, b_reg, dist.n, conventions)
            out[a, b] = dist.probs[a_reg, b_reg]
    return OutcomeDistribution(dist.n, out)


# --- convention calibration -------------------------------------------------


def _recovers_every_k(n: int, conv: ConventionConfig) -> bool:
    N = 1 << n
    for k in range(N):
        dist = run_exact(build_shor_circuit(n, 1, k, conv))
        hits = 0
        for a_reg, b_reg in dist.support():
            a, b = decode_pair(a_reg, b_reg, n, conv)
            if gcd(b, N) != 1:
                continue
            if (-a * pow(b, -1, N)) % N != k:
                return False
            hits += 1
        if not hits:
            return False
    return True


def passing_conventions(n: int, shared_sign_only: bool = False) -> list[ConventionConfig]:
    if not 1 <= n <= 4:
        raise ValueError("calibration is exhaustive and limited to n <= 4")
    return [c for c in convention_space(shared_sign_only) if _recovers_every_k(n, c)]


@lru_cache(maxsize=None)
def calibrate_conventions(n: int = 3, shared_sign_only: bool = False) -> ConventionConfig:
    """First convention (closest to the reference settings first) under which k = -a/b recovers k.

    Checked exhaustively: every k in Z_{2^n}, instance p_index=1, q_index=k,
    every invertible outcome of the exact distribution. At n=1 every
    sign and bit-order choice passes since -k == k mod 2; use n >= 2.
    """
    found = passing_conventions(n, shared_sign_only)
    if not found:
        raise NoConsistentConvention(
            f"no convention recovers k at n={n}"
            + (" with a shared QFT sign" if shared_sign_only else "")
        )
    return found[0]


# --- sampling and noise -----------------------------------------------------


def _uniforms(seed: int, size: int) -> np.ndarray:
    # PCG64 raw 64-bit outputs -> doubles in [0, 1) from the top 53 bits.
    raw = np.random.PCG64(seed).random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def sample(
    dist: OutcomeDistribution, shots: int, seed: int, conventions: ConventionConfig | None = None
) -> Counts:
    """Seeded multinomial draw of ``shots`` outcomes.

    Each shot is an inverse-CDF lookup of one PCG64 uniform, so the result
    depends only on the seed and the probability table, not on the numpy
    version's distribution samplers.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    conventions = conventions or ConventionConfig()
    flat = np.clip(dist.probs.reshape(-1), 0.0, None)
    cdf = np.cumsum(flat)
    picks = np.searchsorted(cdf, _uniforms(seed, shots) * cdf[-1], side="right")
    picks = np.minimum(picks, int(np.flatnonzero(flat)[-1]))
    tally = np.bincount(picks, minlength=flat.size)
    N = dist.N
    counts = {}
    for i in np.flatnonzero(tally):
        a_reg, b_reg = divmod(int(i), N)
        counts[render_bitstring(a_reg, b_reg, dist.n)] = int(tally[i])
    return Counts(shots, dict(sorted(counts.items())))


def apply_noise(dist: OutcomeDistribution, epsilon: float, readout_flip: float) -> OutcomeDistribution:
    """Global depolarizing mix, then independent per-bit readout flips."""
    if not 0.0 <= epsilon <= 1.0 or not 0.0 <= readout_flip <= 1.0:
        raise ValueError("epsilon and readout_flip must lie in [0, 1]")
    n, N = dist.n, dist.N
    p = (1.0 - epsilon) * dist.probs + epsilon / (N * N)
    if readout_flip:
        flip = np.array([[1.0 - readout_flip, readout_flip], [readout_flip, 1.0 - readout_flip]])
        t = p.reshape((2,) * (2 * n))
        for axis in range(2 * n):
            t = np.moveaxis(np.tensordot(flip, t, axes=([1], [axis])), 0, axis)
        p = t.reshape(N, N)
    p = np.clip(p, 0.0, None)
    return OutcomeDistribution(n, p / p.sum())
