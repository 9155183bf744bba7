import numpy as np
import pytest
from conftest import basis_circuits
from hypothesis import given, settings

from topowalk.continuum import EvolutionParams, hamiltonian_two_phase_I_II, trotter_circuit
from topowalk.errors import LoweringRequiredError
from topowalk.qasm import (
    QasmSyntaxError,
    QubitIndexError,
    UndeclaredRegisterError,
    UnknownGateError,
    emit,
    format_angle,
    parse,
    parse_program,
    validate,
    write_qasm,
)
from topowalk.simcore import CNOT, RY, RZ, Circuit, GlobalPhase, H, PauliRot, to_unitary
from topowalk.walkgen import WalkConfig, walk_step_circuit

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_emit_example():
    c = Circuit(2, [H(0), CNOT(0, 1), RZ(np.pi / 8, 1), RY(0.1, 0), GlobalPhase(np.pi / 4)])
    assert emit(c) == (
        HEADER
        + "qreg q[2];\nh q[0];\ncx q[0],q[1];\nrz(pi/4) q[1];\nry(0.20000000000000001) q[0];\n"
        "//@ gphase(pi/4);\n"
    )


def test_emit_with_measurement_and_label():
    text = emit(Circuit(1, [H(0)], label="demo"), measure=True)
    assert text.splitlines()[2] == "// demo"
    assert "creg c[1];" in text and text.endswith("measure q[0] -> c[0];\n")
    prog = validate(text)
    assert prog.measurements == [(0, 0)]


def test_format_angle():
    assert format_angle(0.0) == "0"
    assert format_angle(np.pi) == "pi"
    assert format_angle(-np.pi / 2) == "-pi/2"
    assert format_angle(3 * np.pi / 4) == "3*pi/4"
    assert format_angle(np.pi / 3) == "pi/3"
    assert float(format_angle(0.123)) == 0.123


def test_parse_expressions():
    c = parse(HEADER + "qreg q[1];\nrz(-(pi/2) + 2*0.25) q[0];\nu1(1e-3) q[0];\n")
    assert c.gates[0].angle == pytest.approx((-np.pi / 2 + 0.5) / 2)
    assert c.gates[1].angle == pytest.approx(1e-3)


def test_pauli_gates_must_be_lowered():
    with pytest.raises(LoweringRequiredError):
        emit(Circuit(2, [PauliRot(0.1, "ZZ")]))


@settings(max_examples=50, deadline=None)
@given(basis_circuits(max_qubits=4))
def test_round_trip(circuit):
    text = emit(circuit)
    back = parse(text)
    assert back.n_qubits == circuit.n_qubits
    assert [g.kind for g in back.gates] == [g.kind for g in circuit.gates]
    assert np.abs(to_unitary(back) - to_unitary(circuit)).max() <= 1e-12
    assert emit(back) == text


def test_scenario_circuits_round_trip():
    for c in (
        walk_step_circuit(WalkConfig.preset("I/II", 3, 1 / 8)),
        trotter_circuit(hamiltonian_two_phase_I_II(3), EvolutionParams(0.4, 2)),
    ):
        assert np.abs(to_unitary(parse(emit(c))) - to_unitary(c)).max() <= 1e-12


def test_write_is_deterministic(tmp_path):
    c = walk_step_circuit(WalkConfig.preset("I", 2, 1 / 8))
    a = write_qasm(c, tmp_path / "a.qasm").read_bytes()
    b = write_qasm(c, tmp_path / "b.qasm").read_bytes()
    assert a == b


def test_missing_comma_location():
    text = HEADER + "qreg q[2];\ncx q[0] q[1];\n"
    with pytest.raises(QasmSyntaxError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == (4, 9)
    assert err.value.code == "syntax"


def test_unknown_gate():
    with pytest.raises(UnknownGateError) as err:
        parse(HEADER + "qreg q[1];\nfoo q[0];\n")
    assert (err.value.line, err.value.col) == (4, 1)


def test_index_out_of_range():
    with pytest.raises(QubitIndexError) as err:
        parse(HEADER + "qreg q[2];\nh q[2];\n")
    assert err.value.line == 4


def test_undeclared_register():
    with pytest.raises(UndeclaredRegisterError):
        parse(HEADER + "h q[0];\n")
    with pytest.raises(UndeclaredRegisterError):
        parse(HEADER + "qreg q[1];\nh r[0];\n")


def test_parameter_count_checked():
    with pytest.raises(QasmSyntaxError):
        parse(HEADER + "qreg q[1];\nrz q[0];\n")


def test_validate_requires_trailing_newline():
    with pytest.raises(QasmSyntaxError):
        validate(HEADER + "qreg q[1];\nh q[0];")


def test_validate_rejects_double_measurement():
    text = HEADER + "qreg q[2];\ncreg c[2];\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[0];\n"
    with pytest.raises(QasmSyntaxError):
        validate(text)


def test_program_fields():
    prog = parse_program(HEADER + "qreg q[3];\ncreg c[3];\n")
    assert prog.version == "2.0" and prog.qreg == ("q", 3) and prog.creg == ("c", 3)
