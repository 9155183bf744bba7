"""Circuits for the split-step walk on a ring of N = 2**n sites.

Every circuit builder has a dense oracle next to it, written straight from
the operator definitions (permutation matrices and block sums), so that the
gate-level constructions can be checked entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError, DomainError
from .simcore import (
    CNOT,
    H,
    MAX_DENSE_QUBITS,
    RY,
    RZ,
    SWAP,
    Circuit,
    ControlledPhase,
    GlobalPhase,
    State,
    position_distribution,
    run_circuit_array,
    simplify,
)

COIN = 0

# (theta1, theta2) as functions of the deformation eps; phase I is the one
# written out explicitly, the others extend the limit table symmetrically.
PHASE_PRESETS = {
    "I": (lambda e: e, lambda e: np.pi / 2 + e),
    "II": (lambda e: e, lambda e: -np.pi / 2 - e),
    "III": (lambda e: np.pi / 2 + e, lambda e: e),
    "IV": (lambda e: -np.pi / 2 - e, lambda e: e),
}
# region 0 <= x < N/2 first, N/2 <= x < N second
TWO_PHASE_PRESETS = {"I/II": ("II", "I")}


@dataclass(frozen=True)
class WalkConfig:
    """Coin angles per region; ``minus`` is 0 <= x < N/2, ``plus`` the rest."""

    n_walker: int
    theta1_minus: float
    theta1_plus: float
    theta2_minus: float
    theta2_plus: float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.n_walker < 1:
            raise DomainError("n_walker must be >= 1")
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")

    @property
    def single_phase(self) -> bool:
        return self.theta1_minus == self.theta1_plus and self.theta2_minus == self.theta2_plus

    @classmethod
    def preset(cls, phase: str, n_walker: int, epsilon: float) -> "WalkConfig":
        """Config for a single phase ("I".."IV") or a boundary ("I/II")."""
        return cls(n_walker, *_preset_angles(phase, epsilon), epsilon=epsilon)

    def with_epsilon(self, epsilon: float) -> "WalkConfig":
        return replace(self, epsilon=epsilon)


def _preset_angles(phase: str, eps: float) -> tuple[float, float, float, float]:
    if phase in PHASE_PRESETS:
        lower = upper = phase
    elif phase in TWO_PHASE_PRESETS:
        lower, upper = TWO_PHASE_PRESETS[phase]
    else:
        raise DomainError(f"unknown phase preset {phase!r}")
    t1m, t2m = (f(eps) for f in PHASE_PRESETS[lower])
    t1p, t2p = (f(eps) for f in PHASE_PRESETS[upper])
    return t1m, t1p, t2m, t2p


def preset_angles(phase: str, eps: float) -> tuple[float, float, float, float]:
    """(theta1-, theta1+, theta2-, theta2+) for a preset; eps may be negative."""
    return _preset_angles(phase, eps)


def _walker(n_walker: int) -> list[int]:
    return [1 + j for j in range(n_walker)]


def _check_n(n_walker: int) -> None:
    if n_walker < 1:
        raise DomainError("n_walker must be >= 1")


# ---------------------------------------------------------------------------
# QFT and shifts (walker register only)


def qft_circuit(n_walker: int) -> Circuit:
    """Unitary with <x|U|k> = exp(-2 pi i k x / N) / sqrt(N).

    Textbook ladder with negated controlled phases; the result is the complex
    conjugate of the usual QFT, which is its inverse because the DFT matrix is
    symmetric.
    """
    _check_n(n_walker)
    n = n_walker
    c = Circuit(n, label=f"qft{n}")
    for j in range(n):
        c.append(H(j))
        for l in range(j + 1, n):
            c.append(ControlledPhase(-np.pi / 2 ** (l - j), l, j))
    for j in range(n // 2):
        c.append(SWAP(j, n - 1 - j))
    return c


def qft_oracle(n_walker: int) -> np.ndarray:
    N = 2**n_walker
    x = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(x, x) / N) / np.sqrt(N)


def shift_oracle(n_walker: int, direction: int) -> np.ndarray:
    """Permutation |x> -> |x + direction mod N>."""
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    if n_walker + 1 > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense shift limited to n <= {MAX_DENSE_QUBITS - 1}")
    N = 2**n_walker
    m = np.zeros((N, N))
    x = np.arange(N)
    m[(x + direction) % N, x] = 1.0
    return m


def _momentum_phases(n_walker: int, direction: int) -> list:
    # prod_j exp(-/+ i pi Z_j / 2^(j+1)) = e^{-/+ i pi (1 - 1/N)} diag(e^{+/- 2 pi i k/N})
    return [RZ(direction * np.pi / 2 ** (j + 1), j) for j in range(n_walker)]


def shift_circuit(n_walker: int, direction: int) -> Circuit:
    """L+/- = U_QFT (prod of Z phases) U_QFT^dagger, phase-exact."""
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    qft = qft_circuit(n_walker)
    N = 2**n_walker
    c = Circuit(n_walker, label=f"L{'+' if direction > 0 else '-'}")
    c.extend(qft.inverse().gates)
    c.extend(_momentum_phases(n_walker, direction))
    c.extend(qft.gates)
    c.append(GlobalPhase(direction * np.pi * (1 - 1 / N)))
    return c


# ---------------------------------------------------------------------------
# coin-conditioned steps


def step_oracle(n_walker: int, sign: int) -> np.ndarray:
    """S+ = |0><0| (x) L+ + |1><1| (x) I ;  S- = |0><0| (x) I + |1><1| (x) L-."""
    N = 2**n_walker
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    if sign == 1:
        return np.kron(p0, shift_oracle(n_walker, 1)) + np.kron(p1, np.eye(N))
    if sign == -1:
        return np.kron(p0, np.eye(N)) + np.kron(p1, shift_oracle(n_walker, -1))
    raise DomainError("sign must be +1 or -1")


def momentum_step_circuit(n_walker: int, sign: int) -> Circuit:
    """The diagonal factor: prod_j exp(i pi (Zc -/+ Zj)/2^(j+2)) exp(-i pi Zc Zj/2^(j+2)).

    Each ZZ exponential is CNOT(j -> c) . RZ on the coin . CNOT(j -> c).
    A trailing global phase makes the factor equal to the momentum-space
    block of S+/- exactly.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    n = n_walker
    walker = _walker(n)
    c = Circuit(n + 1, label=f"Sdiag{'+' if sign > 0 else '-'}")
    for j, q in enumerate(walker):
        c.extend([CNOT(q, COIN), RZ(np.pi / 2 ** (j + 2), COIN), CNOT(q, COIN)])
    c.append(RZ(-sum(np.pi / 2 ** (j + 2) for j in range(n)), COIN))
    for j, q in enumerate(walker):
        c.append(RZ(sign * np.pi / 2 ** (j + 2), q))
    c.append(GlobalPhase(sign * np.pi * (1 - 1 / 2**n) / 2))
    return c


def step_circuit(n_walker: int, sign: int) -> Circuit:
    """S+/- as QFT^dagger on the walker, the diagonal factor, then QFT."""
    _check_n(n_walker)
    n = n_walker
    qft = qft_circuit(n).remap(n + 1, _walker(n))
    c = Circuit(n + 1, label=f"S{'+' if sign > 0 else '-'}")
    c.extend(qft.inverse().gates)
    c.extend(momentum_step_circuit(n, sign).gates)
    c.extend(qft.gates)
    return c


# ---------------------------------------------------------------------------
# coins


def coin_oracle(n_walker: int, theta_plus: float, theta_minus: float) -> np.ndarray:
    """sum_x exp(-i theta(x) Y_c) (x) |x><x| with theta(x) = theta- for x < N/2."""
    N = 2**n_walker
    out = np.zeros((2 * N, 2 * N), dtype=complex)
    for x in range(N):
        th = theta_minus if x < N // 2 else theta_plus
        proj = np.zeros((N, N))
        proj[x, x] = 1
        out += np.kron(np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]), proj)
    return out


def coin_circuit(n_walker: int, theta_plus: float, theta_minus: float) -> Circuit:
    """Region-dependent coin with one mean rotation and a CNOT-conjugated split.

    The region is read from walker qubit 0 (the leading bit of x).  With the
    middle rotation at (theta- - theta+)/2, sites with that bit clear turn by
    theta- and sites with it set turn by theta+.
    """
    _check_n(n_walker)
    q0 = 1
    c = Circuit(n_walker + 1, label="T")
    c.extend(
        [
            CNOT(q0, COIN),
            RY((theta_minus - theta_plus) / 2, COIN),
            CNOT(q0, COIN),
            RY((theta_plus + theta_minus) / 2, COIN),
        ]
    )
    return c


# ---------------------------------------------------------------------------
# full step


def walk_step_circuit(config: WalkConfig, cancel: bool = False) -> Circuit:
    """W = S- T2 S+ T1 in the gate order T1, QFT^dag, S+diag, QFT, T2, QFT^dag, S-diag, QFT."""
    n = config.n_walker
    c = Circuit(n + 1, label="W")
    c.extend(coin_circuit(n, config.theta1_plus, config.theta1_minus).gates)
    c.extend(step_circuit(n, 1).gates)
    c.extend(coin_circuit(n, config.theta2_plus, config.theta2_minus).gates)
    c.extend(step_circuit(n, -1).gates)
    return simplify(c) if cancel else c


def walk_step_oracle(config: WalkConfig) -> np.ndarray:
    n = config.n_walker
    t1 = coin_oracle(n, config.theta1_plus, config.theta1_minus)
    t2 = coin_oracle(n, config.theta2_plus, config.theta2_minus)
    return step_oracle(n, -1) @ t2 @ step_oracle(n, 1) @ t1


def run_discrete_walk(
    initial: State, steps: int, config: WalkConfig, circuit: Circuit | None = None
) -> list[np.ndarray]:
    """Position distributions after 0, 1, ..., steps applications of W."""
    if steps < 0:
        raise DomainError("steps must be >= 0")
    if initial.n_walker != config.n_walker:
        raise DomainError("state and config disagree on the lattice size")
    step = circuit if circuit is not None else walk_step_circuit(config)
    amps = initial.amps
    trace = [position_distribution(initial)]
    for _ in range(steps):
        amps = run_circuit_array(amps, step)
        trace.append(position_distribution(State(initial.n_walker, amps)))
    return trace
