"""Monte Carlo trajectories with two-qubit depolarizing errors after each CNOT.

All shots are propagated together as one (shots, 2**m) array.  Shot ``i``
draws its random numbers from its own generator seeded with ``(seed, i)``,
so a run with more shots reproduces the first shots of a smaller run and
splitting shots across workers never changes the result.
"""

from __future__ import annotations

import numpy as np

from .simcore import Circuit, apply_gate_array, apply_pauli_array

PAULI_PAIRS = [a + b for a in "IXYZ" for b in "IXYZ"][1:]  # 15 non-identity pairs


def shot_rngs(seed: int, shots: int) -> list[np.random.Generator]:
    return [np.random.default_rng([int(seed) & (2**64 - 1), i]) for i in range(shots)]


class TrajectoryBatch:
    """Noisy pure-state trajectories sharing one initial state."""

    def __init__(self, amps: np.ndarray, n_qubits: int, shots: int, p: float, rngs):
        if not 0 <= p < 1:
            raise ValueError("noise probability must lie in [0, 1)")
        self.m = n_qubits
        self.p = p
        self.rngs = rngs
        self.amps = np.tile(np.asarray(amps, dtype=complex), (shots, 1))

    @property
    def shots(self) -> int:
        return self.amps.shape[0]

    def reset(self, amps: np.ndarray) -> None:
        self.amps[:] = amps

    def apply(self, circuit: Circuit, repeats: int = 1) -> None:
        n_cnot = circuit.count("CNOT") * repeats
        if self.p > 0 and n_cnot:
            hits = np.empty((self.shots, n_cnot), dtype=bool)
            which = np.empty((self.shots, n_cnot), dtype=np.int64)
            for i, rng in enumerate(self.rngs):
                hits[i] = rng.random(n_cnot) < self.p
                which[i] = rng.integers(0, 15, n_cnot)
        event = 0
        for _ in range(repeats):
            for g in circuit.gates:
                self.amps = apply_gate_array(self.amps, self.m, g)
                if g.kind != "CNOT" or self.p == 0:
                    continue
                rows = np.flatnonzero(hits[:, event])
                for k in np.unique(which[rows, event]):
                    sel = rows[which[rows, event] == k]
                    letters = ["I"] * self.m
                    letters[g.qubits[0]], letters[g.qubits[1]] = PAULI_PAIRS[k]
                    self.amps[sel] = apply_pauli_array(self.amps[sel], self.m, "".join(letters))
                event += 1

    def distributions(self) -> np.ndarray:
        """Per-shot position distributions, shape (shots, N)."""
        p = np.abs(self.amps) ** 2
        N = p.shape[1] // 2
        return p[:, :N] + p[:, N:]


def mean_and_stderr(dists: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    shots = dists.shape[0]
    if (dists == dists[0]).all():
        # identical trajectories: return them bit for bit, the mean would round
        return dists[0].copy(), np.zeros_like(dists[0])
    mean = dists.mean(axis=0)
    if shots < 2:
        return mean, np.zeros_like(mean)
    return mean, dists.std(axis=0, ddof=1) / np.sqrt(shots)
