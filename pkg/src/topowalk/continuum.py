"""Scaling-limit Hamiltonians, their exact and Trotterized evolution, and zero modes.

Hamiltonian constructors come in two flavours.  Single-phase Hamiltonians
are built for any ``n`` from dense shift matrices and then expanded into
Pauli strings.  The boundary Hamiltonian between phases I and II only has
closed forms for ``n = 2`` and ``n = 3`` and is stored term by term.

The literal operator forms carry an overall sign opposite to the direction
in which the walk actually moves; ``SIGN_RESOLUTION`` flips them so that the
stored Hamiltonians agree with the explicit Pauli expansions and with the
walk generator (see ``walk_generator`` and ``fit_time_scale``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np

from .errors import DomainError, NoBoundStateError, UnsupportedError
from .simcore import (
    CNOT,
    PAULI,
    RY,
    RZ,
    Circuit,
    GlobalPhase,
    H,
    Phase,
    PauliRot,
    State,
    pauli_matrix,
)
from .walkgen import PHASE_PRESETS, coin_oracle, preset_angles, shift_oracle, step_oracle

SIGN_RESOLUTION = -1
MAX_DECOMPOSE_QUBITS = 8
SINGLE_PHASES = tuple(PHASE_PRESETS)
TWO_PHASES = ("I/II",)


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    letters: str

    def __post_init__(self):
        object.__setattr__(self, "coeff", float(self.coeff))
        if not np.isfinite(self.coeff):
            raise DomainError("Pauli coefficient must be finite")
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise DomainError(f"bad Pauli string {self.letters!r}")


@dataclass
class Hamiltonian:
    n_qubits: int
    terms: list[PauliTerm]
    label: str = ""
    dense: np.ndarray = field(init=False, repr=False)
    _eig: tuple | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.terms = [t if isinstance(t, PauliTerm) else PauliTerm(*t) for t in self.terms]
        for t in self.terms:
            if len(t.letters) != self.n_qubits:
                raise DomainError(f"term {t.letters!r} does not span {self.n_qubits} qubits")
        D = 2**self.n_qubits
        self.dense = sum(
            (t.coeff * pauli_matrix(t.letters) for t in self.terms),
            np.zeros((D, D), dtype=complex),
        )

    @classmethod
    def from_dense(cls, matrix: np.ndarray, label: str = "") -> "Hamiltonian":
        m = int(round(np.log2(matrix.shape[0])))
        return cls(m, pauli_decompose(matrix), label)

    @property
    def n_walker(self) -> int:
        return self.n_qubits - 1

    def term_dict(self) -> dict[str, float]:
        return {t.letters: t.coeff for t in self.terms}

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            self._eig = np.linalg.eigh(self.dense)
        return self._eig

    def energy(self, state: State) -> float:
        return float(np.vdot(state.amps, self.dense @ state.amps).real)


@dataclass(frozen=True)
class EvolutionParams:
    t: float
    slices: int = 1

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise DomainError("t must be finite")
        if int(self.slices) != self.slices or self.slices < 1:
            raise DomainError("slices must be a positive integer")


def steps_for_time(t: float, epsilon: float, multiple: int = 4) -> tuple[int, float]:
    """Walk steps for time ``t`` under s * eps = t / 2.

    Returns the step count rounded to the nearest multiple of ``multiple``
    together with the unrounded value, so callers can record the rounding.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive to map time to steps")
    exact = t / (2 * epsilon)
    steps = int(multiple * round(exact / multiple))
    return steps, exact


# ---------------------------------------------------------------------------
# Pauli algebra

# R[P, 2a + b] = P[b, a] / 2, so contracting with the (row a, col b) pair of a
# qubit yields tr(P M) / 2 for that factor.
_PAULI_PROJ = np.array(
    [[PAULI[p][b, a] / 2 for a in range(2) for b in range(2)] for p in "IXYZ"]
)


def pauli_decompose(dense: np.ndarray, tol: float = 1e-12) -> list[PauliTerm]:
    """Real Pauli coefficients tr(P M) / 2**m, sorted lexicographically (I < X < Y < Z)."""
    dense = np.asarray(dense, dtype=complex)
    D = dense.shape[0]
    m = int(round(np.log2(D)))
    if dense.shape != (D, D) or 2**m != D:
        raise DomainError("matrix must be square with a power-of-two dimension")
    if m > MAX_DECOMPOSE_QUBITS:
        raise DomainError(f"decomposition limited to {MAX_DECOMPOSE_QUBITS} qubits")
    if np.abs(dense - dense.conj().T).max() > 1e-10:
        raise DomainError("matrix is not Hermitian")
    t = dense.reshape((2,) * (2 * m))
    order = [ax for k in range(m) for ax in (k, m + k)]
    t = t.transpose(order).reshape((4,) * m)
    for k in range(m):
        t = np.moveaxis(np.tensordot(_PAULI_PROJ, t, axes=([1], [k])), 0, k)
    coeffs = t.reshape(-1).real
    out = []
    for idx, letters in enumerate(product("IXYZ", repeat=m)):
        if abs(coeffs[idx]) > tol:
            out.append(PauliTerm(coeffs[idx], "".join(letters)))
    return out


def _coin(c: str) -> np.ndarray:
    return PAULI[c]


def single_phase_operator(phase: str, n_walker: int) -> np.ndarray:
    """Dense operator form as written for each phase, before sign resolution.

    X+/- = X +/- iY act on the coin and the shift polynomials on the walker.
    """
    if n_walker < 1:
        raise DomainError("n_walker must be >= 1")
    N = 2**n_walker
    I = np.eye(N)
    Lp, Lm = shift_oracle(n_walker, 1), shift_oracle(n_walker, -1)
    X, Y = _coin("X"), _coin("Y")
    Xp, Xm = X + 1j * Y, X - 1j * Y
    if phase == "I":
        return -np.kron(Y, 2 * I + Lp + Lm)
    if phase == "II":
        return -np.kron(Y, 2 * I - Lp - Lm)
    if phase == "III":
        return (
            -np.kron(Y, I)
            + 1j * np.kron(Xp, Lp + Lp @ Lp)
            - 1j * np.kron(Xm, Lm + Lm @ Lm)
        )
    if phase == "IV":
        return (
            np.kron(Y, I)
            + 1j * np.kron(Xp, Lp - Lp @ Lp)
            - 1j * np.kron(Xm, Lm - Lm @ Lm)
        )
    raise DomainError(f"unknown phase {phase!r}; expected one of {SINGLE_PHASES}")


def hamiltonian_single_phase(phase: str, n_walker: int) -> Hamiltonian:
    dense = SIGN_RESOLUTION * single_phase_operator(phase, n_walker)
    return Hamiltonian.from_dense(dense, label=f"H_{phase}(n={n_walker})")


# Boundary between phase II (x < N/2) and phase I (x >= N/2).  Terms are kept
# in the order of the product formula used for Trotterization.
_TWO_PHASE_TERMS = {
    2: [(0.5, "YIZ"), (0.5, "YII")],
    3: [
        (1.5, "YIII"),
        (-0.5, "YIZZ"),
        (0.5, "YIIZ"),
        (0.5, "YIZI"),
        (0.5, "YZXX"),
        (0.5, "YZYY"),
        (0.5, "YZIX"),
        (0.5, "YZZX"),
    ],
}


def hamiltonian_two_phase_I_II(n_walker: int) -> Hamiltonian:
    if n_walker not in _TWO_PHASE_TERMS:
        raise UnsupportedError(
            f"no closed-form I/II boundary Hamiltonian for n={n_walker}; "
            "only n=2 and n=3 are available"
        )
    return Hamiltonian(n_walker + 1, list(_TWO_PHASE_TERMS[n_walker]), f"H_I/II(n={n_walker})")


def hamiltonian_for(phase: str, n_walker: int) -> Hamiltonian:
    if phase in TWO_PHASES:
        return hamiltonian_two_phase_I_II(n_walker)
    return hamiltonian_single_phase(phase, n_walker)


# ---------------------------------------------------------------------------
# evolution


def evolution_operator(h: Hamiltonian, t: float) -> np.ndarray:
    w, v = h.eig()
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_exact(h: Hamiltonian, state: State, t: float) -> State:
    if state.n_qubits != h.n_qubits:
        raise DomainError(
            f"Hamiltonian acts on {h.n_qubits} qubits, state has {state.n_qubits}"
        )
    w, v = h.eig()
    amps = v @ (np.exp(-1j * w * t) * (v.conj().T @ state.amps))
    return State(state.n_walker, amps)


def _to_z_basis(letter: str, q: int) -> tuple[list, list]:
    """Gates (before, after) mapping a single-qubit X or Y rotation axis onto Z."""
    if letter == "X":
        return [H(q)], [H(q)]
    if letter == "Y":
        # Y = S H Z H S^dagger
        return [Phase(-np.pi / 2, q), H(q)], [H(q), Phase(np.pi / 2, q)]
    return [], []


def pauli_rotation_circuit(theta: float, letters: str) -> Circuit:
    """exp(-i theta P) with single-qubit gates and a CNOT fan-in.

    The coin is the pivot whenever it carries X, Y or Z: every other
    non-identity qubit is rotated to the Z basis and conjugates the pivot
    rotation with CNOT(q -> coin), turning RY or RZ on the coin into the
    full string.
    """
    m = len(letters)
    c = Circuit(m, label=f"exp(-i{theta:g}{letters})")
    support = [q for q, a in enumerate(letters) if a != "I"]
    if not support:
        return c.append(GlobalPhase(-theta))
    pivot = 0 if letters[0] != "I" else support[-1]
    axis = letters[pivot]
    pre, post = [], []
    if axis == "X" or (pivot != 0 and axis == "Y"):
        b, a = _to_z_basis(axis, pivot)
        pre += b
        post = a + post
        axis = "Z"
    others = [q for q in support if q != pivot]
    for q in others:
        b, a = _to_z_basis(letters[q], q)
        pre += b
        post = a + post
    ladder = [CNOT(q, pivot) for q in others]
    rot = RY(theta, pivot) if axis == "Y" else RZ(theta, pivot)
    c.extend(pre + ladder + [rot] + ladder[::-1] + post)
    return c


def lower_pauli_rotations(circuit: Circuit) -> Circuit:
    out = Circuit(circuit.n_qubits, label=circuit.label)
    for g in circuit.gates:
        if g.kind == "PAULI":
            out.extend(pauli_rotation_circuit(g.angle, g.letters).gates)
        else:
            out.append(g)
    return out


def trotter_circuit(h: Hamiltonian, params: EvolutionParams, lower: bool = True) -> Circuit:
    """First-order product formula, ``params.slices`` repetitions.

    Within a slice the operator product runs over the terms in stored order,
    leftmost first, so the circuit applies them last-to-first.
    """
    dt = params.t / params.slices
    c = Circuit(h.n_qubits, label=f"trotter({h.label}, t={params.t:g}, T={params.slices})")
    for _ in range(params.slices):
        for term in reversed(h.terms):
            c.append(PauliRot(term.coeff * dt, term.letters))
    return lower_pauli_rotations(c) if lower else c


# ---------------------------------------------------------------------------
# zero modes


@dataclass
class KernelResult:
    dimension: int
    basis: np.ndarray  # columns span the null space
    support: np.ndarray  # per-site weight, summed over coin and basis vectors

    def sites(self, threshold: float = 1e-9) -> list[int]:
        return [int(x) for x in np.flatnonzero(self.support > threshold)]


def kernel(h: Hamiltonian, tol: float = 1e-9) -> KernelResult:
    """Eigenvectors whose |eigenvalue| is below ``tol`` times the largest one."""
    w, v = h.eig()
    scale = np.abs(w).max() if w.size and np.abs(w).max() > 0 else 1.0
    basis = v[:, np.abs(w) < tol * scale]
    N = 2 ** (h.n_qubits - 1)
    weight = (np.abs(basis) ** 2).sum(axis=1)
    return KernelResult(basis.shape[1], basis, weight[:N] + weight[N:])


def bound_eigenstate(h: Hamiltonian, site: int, coin: int = 0, tol: float = 1e-9) -> State:
    """Normalized zero mode with maximal weight on ``site``.

    Prefers the projection of |coin, site> onto the kernel (then the other
    coin value) when that projection already reaches the maximal weight;
    otherwise returns the top eigenvector of the site projector compressed
    to the kernel.
    """
    N = 2 ** (h.n_qubits - 1)
    if not 0 <= site < N:
        raise DomainError(f"site {site} outside [0, {N})")
    ker = kernel(h, tol)
    if ker.dimension == 0:
        raise NoBoundStateError(f"{h.label} has an empty kernel")
    K = ker.basis
    rows = [site, N + site]
    M = K[rows].conj().T @ K[rows]
    mu, vecs = np.linalg.eigh(M)
    best = mu[-1]
    if best < tol:
        raise NoBoundStateError(f"{h.label}: kernel has no support at site {site}")
    for c in (coin, 1 - coin):
        e = np.zeros(2 * N, dtype=complex)
        e[c * N + site] = 1
        proj = K @ (K.conj().T @ e)
        nrm = np.linalg.norm(proj)
        if nrm > tol:
            proj /= nrm
            if abs(proj[rows[0]]) ** 2 + abs(proj[rows[1]]) ** 2 >= best - 1e-9:
                return State(h.n_qubits - 1, _fix_phase(proj))
    return State(h.n_qubits - 1, _fix_phase(K @ vecs[:, -1]))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v * (abs(v[i]) / v[i])


# ---------------------------------------------------------------------------
# bridge to the discrete walk


def walk_generator(phase: str, n_walker: int) -> np.ndarray:
    """Generator G of four walk steps near eps = 0: W^4 = I - i (8 eps) G + O(eps^2).

    Four steps span time 8 eps under s * eps = t / 2.  The derivative is
    taken analytically from the product W = S- T2 S+ T1.
    """
    a0 = np.array(preset_angles(phase, 0.0))
    slope = np.array(preset_angles(phase, 1.0)) - a0
    t1m, t1p, t2m, t2p = a0
    d1m, d1p, d2m, d2p = slope
    n = n_walker
    N = 2**n
    y = np.kron(_coin("Y"), np.eye(N))

    def dcoin(tp, tm, dp, dm):
        # derivative of sum_x exp(-i theta(x) Y) |x><x| along eps
        rates = np.diag(np.concatenate([np.where(np.arange(N) < N // 2, dm, dp)] * 2))
        return -1j * rates @ y @ coin_oracle(n, tp, tm)

    sp, sm = step_oracle(n, 1), step_oracle(n, -1)
    T1, T2 = coin_oracle(n, t1p, t1m), coin_oracle(n, t2p, t2m)
    dT1, dT2 = dcoin(t1p, t1m, d1p, d1m), dcoin(t2p, t2m, d2p, d2m)
    W = sm @ T2 @ sp @ T1
    dW = sm @ dT2 @ sp @ T1 + sm @ T2 @ sp @ dT1
    pw = [np.linalg.matrix_power(W, k) for k in range(4)]
    if np.abs(pw[3] @ W - np.eye(2 * N)).max() > 1e-10:
        raise DomainError(f"phase {phase!r}: W^4 is not the identity at eps = 0")
    dW4 = sum(pw[3 - k] @ dW @ pw[k] for k in range(4))
    return 1j * dW4 / 8


@dataclass(frozen=True)
class ScalingFit:
    """G ~ sign * scale * H; ``residual`` is the relative Frobenius mismatch."""

    sign: int
    scale: float
    residual: float


def fit_time_scale(h: Hamiltonian, generator: np.ndarray) -> ScalingFit:
    hn = np.linalg.norm(h.dense)
    gn = np.linalg.norm(generator)
    if hn == 0 or gn == 0:
        raise DomainError("cannot fit a time scale to a zero operator")
    overlap = np.vdot(h.dense, generator).real
    sign = 1 if overlap >= 0 else -1
    scale = gn / hn
    residual = np.linalg.norm(generator - sign * scale * h.dense) / gn
    return ScalingFit(sign, float(scale), float(residual))


def hamiltonian_walk_fit(phase: str, n_walker: int) -> ScalingFit:
    return fit_time_scale(hamiltonian_for(phase, n_walker), walk_generator(phase, n_walker))
