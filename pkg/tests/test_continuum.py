from itertools import product

import numpy as np
import pytest
from conftest import random_unit_vector
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from topowalk.continuum import (
    SIGN_RESOLUTION,
    EvolutionParams,
    Hamiltonian,
    PauliTerm,
    bound_eigenstate,
    evolve_exact,
    fit_time_scale,
    hamiltonian_for,
    hamiltonian_single_phase,
    hamiltonian_two_phase_I_II,
    hamiltonian_walk_fit,
    kernel,
    pauli_decompose,
    pauli_rotation_circuit,
    single_phase_operator,
    steps_for_time,
    trotter_circuit,
    walk_generator,
)
from topowalk.errors import DomainError, NoBoundStateError, UnsupportedError
from topowalk.simcore import State, basis_state, pauli_matrix, position_distribution, to_unitary

# Pauli-string forms, coin letter first
H_I_N2 = {"YII": 2.0, "YIX": 1.0, "YXX": 1.0}
H_I_N3 = {"YIII": 2.0, "YIIX": 1.0, "YIXX": 0.5, "YIYY": 0.5, "YXXX": 0.5, "YXYY": -0.5}
H_BOUNDARY_N2 = {"YII": 0.5, "YIZ": 0.5}
H_BOUNDARY_N3 = {
    "YIII": 1.5, "YIZI": 0.5, "YIIZ": 0.5, "YIZZ": -0.5,
    "YZXX": 0.5, "YZYY": 0.5, "YZIX": 0.5, "YZZX": 0.5,
}


def naive_decompose(M):
    m = int(np.log2(M.shape[0]))
    out = {}
    for letters in product("IXYZ", repeat=m):
        s = "".join(letters)
        c = np.trace(pauli_matrix(s) @ M) / 2**m
        if abs(c) > 1e-12:
            out[s] = c
    return out


def assert_terms(h, expected):
    got = h.term_dict()
    assert set(got) == set(expected)
    for k, v in expected.items():
        assert abs(got[k] - v) <= 1e-12


def test_phase_I_n2_terms():
    assert_terms(hamiltonian_single_phase("I", 2), H_I_N2)


def test_phase_I_n3_terms():
    assert_terms(hamiltonian_single_phase("I", 3), H_I_N3)


def test_boundary_terms():
    assert_terms(hamiltonian_two_phase_I_II(2), H_BOUNDARY_N2)
    assert_terms(hamiltonian_two_phase_I_II(3), H_BOUNDARY_N3)


@pytest.mark.parametrize("phase", ["I", "II"])
def test_sign_resolution_is_the_only_change(phase):
    for n in (2, 3):
        h = hamiltonian_single_phase(phase, n)
        np.testing.assert_allclose(h.dense, SIGN_RESOLUTION * single_phase_operator(phase, n), atol=1e-12)


def test_phase_II_mirrors_phase_I_walker_terms():
    hI, hII = hamiltonian_single_phase("I", 3).term_dict(), hamiltonian_single_phase("II", 3).term_dict()
    assert hII["YIII"] == pytest.approx(hI["YIII"])
    for k in hI:
        if k != "YIII":
            assert hII[k] == pytest.approx(-hI[k])


@pytest.mark.parametrize("phase", ["III", "IV"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_other_phases_hermitian(phase, n):
    M = single_phase_operator(phase, n)
    assert np.abs(M - M.conj().T).max() <= 1e-12
    hamiltonian_single_phase(phase, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_pauli_decompose_matches_trace_formula(m, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2**m, 2**m)) + 1j * rng.normal(size=(2**m, 2**m))
    M = A + A.conj().T
    fast = {t.letters: t.coeff for t in pauli_decompose(M)}
    slow = naive_decompose(M)
    assert set(fast) == set(slow)
    for k in slow:
        assert abs(fast[k] - slow[k]) <= 1e-10
    np.testing.assert_allclose(Hamiltonian.from_dense(M).dense, M, atol=1e-10)


def test_pauli_decompose_rejects_non_hermitian():
    with pytest.raises(DomainError):
        pauli_decompose(np.array([[0, 1], [0, 0]]))


def test_bad_terms_rejected():
    with pytest.raises(DomainError):
        PauliTerm(1.0, "YQ")
    with pytest.raises(DomainError):
        Hamiltonian(3, [PauliTerm(1.0, "YI")])


def test_two_phase_only_small_lattices():
    with pytest.raises(UnsupportedError):
        hamiltonian_two_phase_I_II(4)
    with pytest.raises(DomainError):
        hamiltonian_for("V", 2)


@pytest.mark.parametrize("phase,n", [("I", 2), ("I", 3), ("I/II", 3), ("III", 2)])
def test_evolve_exact_against_expm(phase, n):
    h = hamiltonian_for(phase, n)
    psi = basis_state(n, 0, 1)
    for t in (0.0, 0.3, 1.7):
        expected = expm(-1j * t * h.dense) @ psi.amps
        np.testing.assert_allclose(evolve_exact(h, psi, t).amps, expected, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 5))
def test_energy_and_norm_conserved(seed, t):
    h = hamiltonian_single_phase("I", 3)
    psi = State(3, random_unit_vector(np.random.default_rng(seed), 16))
    out = evolve_exact(h, psi, t)
    assert out.norm() == pytest.approx(1, abs=1e-12)
    assert h.energy(out) == pytest.approx(h.energy(psi), abs=1e-10)


def test_evolve_exact_rejects_size_mismatch():
    with pytest.raises(DomainError):
        evolve_exact(hamiltonian_for("I", 2), basis_state(3, 0, 0), 1.0)


@settings(max_examples=60, deadline=None)
@given(st.text("IXYZ", min_size=1, max_size=4), st.floats(-3, 3))
def test_pauli_rotation_circuit(letters, theta):
    U = to_unitary(pauli_rotation_circuit(theta, letters))
    assert np.abs(U - expm(-1j * theta * pauli_matrix(letters))).max() <= 1e-12


def test_boundary_circuit_gate_sequence():
    # exp(-i t/2 YIZ) exp(-i t/2 YII): RY, CNOT(1 -> c), RY, CNOT(1 -> c)
    h = hamiltonian_two_phase_I_II(2)
    c = trotter_circuit(h, EvolutionParams(0.7, 1))
    assert [g.kind for g in c.gates] == ["RY", "CNOT", "RY", "CNOT"]
    assert c.gates[1].qubits == (2, 0)
    assert all(g.angle == pytest.approx(0.35) for g in c.gates if g.kind == "RY")
    assert np.abs(to_unitary(c) - expm(-0.7j * h.dense)).max() <= 1e-12


def test_phase_I_n2_trotter_exact_at_one_slice():
    h = hamiltonian_single_phase("I", 2)
    for t in (0.4, 1.3):
        U = to_unitary(trotter_circuit(h, EvolutionParams(t, 1)))
        assert np.abs(U - expm(-1j * t * h.dense)).max() <= 1e-10


def test_trotter_unlowered_matches_lowered():
    h = hamiltonian_single_phase("I", 3)
    p = EvolutionParams(0.5, 3)
    a = to_unitary(trotter_circuit(h, p, lower=False))
    b = to_unitary(trotter_circuit(h, p))
    assert np.abs(a - b).max() <= 1e-12


def test_evolution_params_validation():
    with pytest.raises(DomainError):
        EvolutionParams(1.0, 0)
    with pytest.raises(DomainError):
        EvolutionParams(float("nan"), 1)


def test_steps_for_time():
    assert steps_for_time(1.0, 1 / 8) == (4, 4.0)
    assert steps_for_time(0.5, 1 / 32) == (8, 8.0)
    assert steps_for_time(0.25, 1 / 8, multiple=1) == (1, 1.0)
    assert steps_for_time(0.3, 1 / 8)[0] == 0
    with pytest.raises(DomainError):
        steps_for_time(1.0, 0.0)


def test_boundary_kernel_n2():
    k = kernel(hamiltonian_two_phase_I_II(2))
    assert k.dimension == 4
    assert k.sites() == [1, 3]


def test_boundary_kernel_n3():
    k = kernel(hamiltonian_two_phase_I_II(3))
    assert k.dimension == 4
    assert set(k.sites()) == {3, 7}


def test_phase_I_kernel():
    # rank oracle from the dense matrix
    h = hamiltonian_single_phase("I", 2)
    assert kernel(h).dimension == 8 - np.linalg.matrix_rank(h.dense) == 2


def test_bound_eigenstate():
    h = hamiltonian_two_phase_I_II(2)
    psi = bound_eigenstate(h, 1)
    assert np.linalg.norm(h.dense @ psi.amps) <= 1e-10
    assert position_distribution(psi)[1] == pytest.approx(1)
    with pytest.raises(NoBoundStateError):
        bound_eigenstate(h, 0)
    with pytest.raises(DomainError):
        bound_eigenstate(h, 4)


def test_bound_eigenstate_n3_boundary():
    h = hamiltonian_two_phase_I_II(3)
    for site in (3, 7):
        psi = bound_eigenstate(h, site)
        assert np.linalg.norm(h.dense @ psi.amps) <= 1e-10
        assert position_distribution(psi)[site] > 0.5


@pytest.mark.parametrize("phase", ["I", "II"])
@pytest.mark.parametrize("n", [2, 3])
def test_walk_generator_fit(phase, n):
    fit = hamiltonian_walk_fit(phase, n)
    assert fit.sign == 1
    assert fit.scale == pytest.approx(0.25, abs=1e-12)
    assert fit.residual <= 1e-12


def test_walk_generator_matches_finite_difference():
    from topowalk.walkgen import WalkConfig, walk_step_oracle

    eps = 1e-6
    W = walk_step_oracle(WalkConfig.preset("I", 2, eps))
    fd = 1j * (np.linalg.matrix_power(W, 4) - np.eye(8)) / (8 * eps)
    assert np.abs(fd - walk_generator("I", 2)).max() <= 1e-5


def test_fit_rejects_zero():
    with pytest.raises(DomainError):
        fit_time_scale(Hamiltonian(1, []), np.eye(2))
