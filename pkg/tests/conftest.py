import numpy as np
from hypothesis import strategies as st

from topowalk.simcore import (
    CNOT,
    H,
    RY,
    RZ,
    SWAP,
    Circuit,
    ControlledPhase,
    GlobalPhase,
    Phase,
)

angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi, allow_nan=False)


@st.composite
def basis_circuits(draw, max_qubits=4, max_gates=25):
    """Random circuits over the gate set that has a direct QASM spelling."""
    m = draw(st.integers(1, max_qubits))
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        kinds = ["H", "RY", "RZ", "PHASE", "GPHASE"]
        if m > 1:
            kinds += ["CNOT", "CPHASE", "SWAP"]
        kind = draw(st.sampled_from(kinds))
        a = draw(st.integers(0, m - 1))
        if kind in ("CNOT", "CPHASE", "SWAP"):
            b = draw(st.integers(0, m - 2))
            b = b + 1 if b >= a else b
        theta = draw(angles)
        gates.append(
            {
                "H": lambda: H(a),
                "RY": lambda: RY(theta, a),
                "RZ": lambda: RZ(theta, a),
                "PHASE": lambda: Phase(theta, a),
                "GPHASE": lambda: GlobalPhase(theta),
                "CNOT": lambda: CNOT(a, b),
                "CPHASE": lambda: ControlledPhase(theta, a, b),
                "SWAP": lambda: SWAP(a, b),
            }[kind]()
        )
    return Circuit(m, gates)


def random_unit_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
