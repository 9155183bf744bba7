"""Statevector representation, gate IR and gate-application kernels.

Register layout: the coin is circuit qubit 0 and walker qubit ``j`` is
circuit qubit ``1 + j``.  Qubit ``q`` of an ``m``-qubit register carries the
bit of weight ``2**(m - 1 - q)`` in the amplitude index, so the amplitude of
``|c>|x>`` sits at ``c * 2**n + x`` and walker qubit 0 is the most
significant bit of ``x``.

Rotations use the full-angle convention: ``RY(t) = exp(-i t Y)``,
``RZ(t) = exp(-i t Z)`` and ``PauliRot(t, P) = exp(-i t P)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError

MAX_DENSE_QUBITS = 12

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# kind -> (number of qubit operands, takes an angle)
GATE_KINDS = {
    "H": (1, False),
    "RY": (1, True),
    "RZ": (1, True),
    "PHASE": (1, True),
    "CNOT": (2, False),
    "CPHASE": (2, True),
    "SWAP": (2, False),
    "PAULI": (0, True),
    "GPHASE": (0, True),
}
SELF_INVERSE = frozenset({"H", "CNOT", "SWAP"})


@dataclass(frozen=True)
class Gate:
    """One gate of the IR.

    ``qubits`` lists operands in order (control before target for CNOT and
    CPHASE).  ``letters`` is only used by PAULI and spans the whole register,
    index 0 being the coin.
    """

    kind: str
    qubits: tuple[int, ...] = ()
    angle: float = 0.0
    letters: str = ""

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        arity, _ = GATE_KINDS[self.kind]
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "angle", float(self.angle))
        if len(self.qubits) != arity:
            raise DomainError(f"{self.kind} takes {arity} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise DomainError(f"{self.kind}: control and target must differ")
        if any(q < 0 for q in self.qubits):
            raise DomainError(f"negative qubit index in {self.qubits}")
        if self.kind == "PAULI":
            if not self.letters or set(self.letters) - set("IXYZ"):
                raise DomainError(f"bad Pauli string {self.letters!r}")
        elif self.letters:
            raise DomainError("letters are only meaningful for PAULI")
        if not np.isfinite(self.angle):
            raise DomainError("gate angle must be finite")

    @property
    def min_qubits(self) -> int:
        if self.kind == "PAULI":
            return len(self.letters)
        return max(self.qubits, default=-1) + 1

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        return Gate(self.kind, self.qubits, -self.angle, self.letters)

    def matrix(self) -> np.ndarray:
        """Local unitary on ``qubits`` (first operand most significant).

        PAULI gates return the full register matrix, GPHASE a 1x1 matrix.
        """
        a = self.angle
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if self.kind == "RY":
            c, s = np.cos(a), np.sin(a)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == "RZ":
            return np.diag([np.exp(-1j * a), np.exp(1j * a)])
        if self.kind == "PHASE":
            return np.diag([1, np.exp(1j * a)])
        if self.kind == "CNOT":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        if self.kind == "CPHASE":
            return np.diag([1, 1, 1, np.exp(1j * a)])
        if self.kind == "SWAP":
            return np.array(
                [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
            )
        if self.kind == "PAULI":
            p = pauli_matrix(self.letters)
            return np.cos(a) * np.eye(p.shape[0]) - 1j * np.sin(a) * p
        return np.array([[np.exp(1j * a)]])


def H(q: int) -> Gate:
    return Gate("H", (q,))


def RY(theta: float, q: int) -> Gate:
    return Gate("RY", (q,), theta)


def RZ(theta: float, q: int) -> Gate:
    return Gate("RZ", (q,), theta)


def Phase(phi: float, q: int) -> Gate:
    """diag(1, e^{i phi})."""
    return Gate("PHASE", (q,), phi)


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def ControlledPhase(phi: float, control: int, target: int) -> Gate:
    return Gate("CPHASE", (control, target), phi)


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def PauliRot(theta: float, letters: str) -> Gate:
    return Gate("PAULI", (), theta, letters)


def GlobalPhase(phi: float) -> Gate:
    """Scalar e^{i phi} on the whole register."""
    return Gate("GPHASE", (), phi)


def pauli_matrix(letters: str) -> np.ndarray:
    return reduce(np.kron, [PAULI[c] for c in letters])


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DomainError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if gate.kind == "PAULI":
            if len(gate.letters) != self.n_qubits:
                raise DomainError(
                    f"Pauli string {gate.letters!r} does not span {self.n_qubits} qubits"
                )
        elif gate.min_qubits > self.n_qubits:
            raise DomainError(f"{gate} does not fit a {self.n_qubits}-qubit register")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DomainError("cannot concatenate circuits of different widths")
        return Circuit(self.n_qubits, self.gates + other.gates, self.label)

    def inverse(self) -> "Circuit":
        label = f"{self.label}^-1" if self.label else ""
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)], label)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def remap(self, n_qubits: int, mapping: Sequence[int]) -> "Circuit":
        """Place this circuit on a wider register; qubit q goes to mapping[q]."""
        if len(mapping) != self.n_qubits or len(set(mapping)) != len(mapping):
            raise DomainError("mapping must be injective over all qubits")
        out = Circuit(n_qubits, label=self.label)
        for g in self.gates:
            if g.kind == "PAULI":
                letters = ["I"] * n_qubits
                for q, c in enumerate(g.letters):
                    letters[mapping[q]] = c
                out.append(PauliRot(g.angle, "".join(letters)))
            else:
                out.append(Gate(g.kind, tuple(mapping[q] for q in g.qubits), g.angle))
        return out


@dataclass
class State:
    """Amplitudes over coin (x) walker; ``amps`` has length 2**(n_walker+1)."""

    n_walker: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2 ** (self.n_walker + 1),):
            raise DomainError(
                f"expected {2 ** (self.n_walker + 1)} amplitudes, got {self.amps.shape}"
            )

    @property
    def n_qubits(self) -> int:
        return self.n_walker + 1

    @property
    def n_sites(self) -> int:
        return 2**self.n_walker

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "State":
        return State(self.n_walker, self.amps.copy())


def basis_state(n_walker: int, coin: int, x: int) -> State:
    N = 2**n_walker
    if coin not in (0, 1):
        raise DomainError(f"coin must be 0 or 1, got {coin}")
    if not 0 <= x < N:
        raise DomainError(f"site {x} outside [0, {N})")
    amps = np.zeros(2 * N, dtype=complex)
    amps[coin * N + x] = 1.0
    return State(n_walker, amps)


def momentum_state(n_walker: int, k: int, coin: int = 0) -> State:
    """Coin basis state times sum_x e^{-2 pi i k x/N}|x>/sqrt(N)."""
    N = 2**n_walker
    if coin not in (0, 1):
        raise DomainError(f"coin must be 0 or 1, got {coin}")
    amps = np.zeros(2 * N, dtype=complex)
    x = np.arange(N)
    amps[coin * N : (coin + 1) * N] = np.exp(-2j * np.pi * k * x / N) / np.sqrt(N)
    return State(n_walker, amps)


def position_distribution(state: State) -> np.ndarray:
    N = state.n_sites
    p = np.abs(state.amps) ** 2
    return p[:N] + p[N:]


# ---------------------------------------------------------------------------
# kernels: operate on arrays of shape (..., 2**m); leading axes are a batch


def _split(amps: np.ndarray, m: int) -> np.ndarray:
    return amps.reshape((-1,) + (2,) * m)


def _index(m: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * (m + 1)
    for q, b in fixed.items():
        idx[1 + q] = b
    return tuple(idx)


def _apply_pauli_string(psi: np.ndarray, m: int, letters: str) -> np.ndarray:
    out = psi
    for q, c in enumerate(letters):
        if c == "I":
            continue
        axis = 1 + q
        if c in "XY":
            out = np.flip(out, axis=axis)
        if c in "YZ":
            sign = np.array([1, -1], dtype=complex)
            if c == "Y":
                # (Y psi)_0 = -i psi_1, (Y psi)_1 = i psi_0; psi is already flipped
                sign = np.array([-1j, 1j])
            shape = [1] * (m + 1)
            shape[axis] = 2
            out = out * sign.reshape(shape)
    return np.ascontiguousarray(out)


def apply_gate_array(amps: np.ndarray, m: int, gate: Gate) -> np.ndarray:
    """Apply ``gate`` to a (batch of) amplitude vectors over ``m`` qubits."""
    shape = amps.shape
    psi = _split(np.array(amps, dtype=complex, copy=True), m)
    k, a = gate.kind, gate.angle
    if k in ("H", "RY"):
        (q,) = gate.qubits
        u = gate.matrix()
        a0, a1 = psi[_index(m, {q: 0})].copy(), psi[_index(m, {q: 1})].copy()
        psi[_index(m, {q: 0})] = u[0, 0] * a0 + u[0, 1] * a1
        psi[_index(m, {q: 1})] = u[1, 0] * a0 + u[1, 1] * a1
    elif k == "RZ":
        (q,) = gate.qubits
        psi[_index(m, {q: 0})] *= np.exp(-1j * a)
        psi[_index(m, {q: 1})] *= np.exp(1j * a)
    elif k == "PHASE":
        (q,) = gate.qubits
        psi[_index(m, {q: 1})] *= np.exp(1j * a)
    elif k == "CNOT":
        c, t = gate.qubits
        i0, i1 = _index(m, {c: 1, t: 0}), _index(m, {c: 1, t: 1})
        psi[i0], psi[i1] = psi[i1].copy(), psi[i0].copy()
    elif k == "CPHASE":
        c, t = gate.qubits
        psi[_index(m, {c: 1, t: 1})] *= np.exp(1j * a)
    elif k == "SWAP":
        p, q = gate.qubits
        psi = np.ascontiguousarray(np.swapaxes(psi, 1 + p, 1 + q))
    elif k == "PAULI":
        if len(gate.letters) != m:
            raise DomainError(f"Pauli string {gate.letters!r} does not span {m} qubits")
        psi = np.cos(a) * psi - 1j * np.sin(a) * _apply_pauli_string(psi, m, gate.letters)
    elif k == "GPHASE":
        psi *= np.exp(1j * a)
    return psi.reshape(shape)


def apply_pauli_array(amps: np.ndarray, m: int, letters: str) -> np.ndarray:
    """Multiply by the Pauli string ``letters`` (no rotation)."""
    shape = amps.shape
    return _apply_pauli_string(_split(np.asarray(amps, dtype=complex), m), m, letters).reshape(
        shape
    )


def apply_gate(state: State, gate: Gate) -> State:
    m = state.n_qubits
    if gate.kind != "PAULI" and gate.min_qubits > m:
        raise DomainError(f"{gate} does not fit a {m}-qubit register")
    return State(state.n_walker, apply_gate_array(state.amps, m, gate))


def apply_circuit(state: State, circuit: Circuit) -> State:
    if circuit.n_qubits != state.n_qubits:
        raise DomainError(
            f"circuit acts on {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    amps = state.amps
    for g in circuit.gates:
        amps = apply_gate_array(amps, circuit.n_qubits, g)
    return State(state.n_walker, amps)


def run_circuit_array(amps: np.ndarray, circuit: Circuit) -> np.ndarray:
    for g in circuit.gates:
        amps = apply_gate_array(amps, circuit.n_qubits, g)
    return amps


# ---------------------------------------------------------------------------
# dense oracle: built from gate matrices by index arithmetic, never via the kernels


def embed(gate: Gate, m: int) -> np.ndarray:
    """Full 2**m x 2**m matrix of ``gate`` on an ``m``-qubit register."""
    D = 2**m
    if gate.kind == "PAULI":
        if len(gate.letters) != m:
            raise DomainError(f"Pauli string {gate.letters!r} does not span {m} qubits")
        return gate.matrix()
    if gate.kind == "GPHASE":
        return np.exp(1j * gate.angle) * np.eye(D, dtype=complex)
    u = gate.matrix()
    qs = gate.qubits
    k = len(qs)
    idx = np.arange(D)
    weights = [1 << (m - 1 - q) for q in qs]
    sub_in = np.zeros(D, dtype=np.int64)
    rest = idx.copy()
    for w in weights:
        sub_in = (sub_in << 1) | ((idx & w) > 0)
        rest &= ~w
    full = np.zeros((D, D), dtype=complex)
    for s_out in range(2**k):
        j = rest.copy()
        for pos, w in enumerate(weights):
            if (s_out >> (k - 1 - pos)) & 1:
                j |= w
        full[j, idx] = u[s_out, sub_in]
    return full


def to_unitary(circuit: Circuit) -> np.ndarray:
    m = circuit.n_qubits
    if m > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense unitary limited to {MAX_DENSE_QUBITS} qubits, got {m}")
    u = np.eye(2**m, dtype=complex)
    for g in circuit.gates:
        u = embed(g, m) @ u
    return u


# ---------------------------------------------------------------------------
# circuit transforms


def _touched(gate: Gate, m: int) -> set[int]:
    if gate.kind == "PAULI":
        return {q for q, c in enumerate(gate.letters) if c != "I"}
    if gate.kind == "GPHASE":
        return set()
    return set(gate.qubits)


def _cancels(a: Gate, b: Gate) -> bool:
    if a.kind != b.kind or a.kind not in SELF_INVERSE:
        return False
    if a.kind == "SWAP":
        return set(a.qubits) == set(b.qubits)
    return a.qubits == b.qubits


def simplify(circuit: Circuit) -> Circuit:
    """Drop zero-angle rotations and cancel adjacent self-inverse pairs.

    Two gates are adjacent when no gate in between touches any of their
    qubits.  Repeats until nothing changes.
    """
    gates = [g for g in circuit.gates if not (GATE_KINDS[g.kind][1] and g.angle == 0.0)]
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(gates):
            if g.kind not in SELF_INVERSE:
                continue
            qs = _touched(g, circuit.n_qubits)
            for j in range(i + 1, len(gates)):
                h = gates[j]
                if _cancels(g, h):
                    del gates[j]
                    del gates[i]
                    changed = True
                    break
                if qs & _touched(h, circuit.n_qubits):
                    break
            if changed:
                break
    return Circuit(circuit.n_qubits, gates, circuit.label)


def lower_to_cnot(circuit: Circuit) -> Circuit:
    """Rewrite CPHASE and SWAP with CNOT and single-qubit phases (exact)."""
    out = Circuit(circuit.n_qubits, label=circuit.label)
    for g in circuit.gates:
        if g.kind == "CPHASE":
            c, t = g.qubits
            half = g.angle / 2
            out.extend([Phase(half, c), CNOT(c, t), Phase(-half, t), CNOT(c, t), Phase(half, t)])
        elif g.kind == "SWAP":
            a, b = g.qubits
            out.extend([CNOT(a, b), CNOT(b, a), CNOT(a, b)])
        else:
            out.append(g)
    return out
