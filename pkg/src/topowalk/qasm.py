"""OpenQASM 2.0 emission and parsing for the basis-gate subset.

Angle conventions at the file boundary are the standard half-angle ones:
``ry(l) = exp(-i l Y / 2)`` and ``rz(l) = exp(-i l Z / 2)``, while the
circuit IR uses full angles, so ``RY(t)`` is written as ``ry(2t)``.
``u1(l) = diag(1, e^{il})`` and ``cu1`` is its controlled form.  Global
phases are written as ``//@ gphase(<angle>);`` pragma comments: ordinary
OpenQASM readers skip them, this parser reads them back so round trips are
exact at the matrix level.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import LoweringRequiredError, TopowalkError
from .simcore import (
    CNOT,
    RY,
    RZ,
    SWAP,
    Circuit,
    ControlledPhase,
    GlobalPhase,
    H,
    Phase,
)

PRAGMA = "//@ "
_PI_DENOMINATORS = tuple(2**k for k in range(13)) + (3, 6, 12)


class QasmError(TopowalkError, ValueError):
    code = "qasm"

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class QasmSyntaxError(QasmError):
    code = "syntax"


class UnknownGateError(QasmError):
    code = "unknown_gate"


class QubitIndexError(QasmError):
    code = "qubit_range"


class UndeclaredRegisterError(QasmError):
    code = "undeclared"


# ---------------------------------------------------------------------------
# emission


def format_angle(value: float) -> str:
    """Exact multiple of pi when one with a small denominator matches, else 17 digits."""
    if value == 0:
        return "0"
    r = value / math.pi
    for q in _PI_DENOMINATORS:
        p = round(r * q)
        if p and abs(p * math.pi / q - value) <= 4 * math.ulp(value):
            f = Fraction(p, q)
            num, den = f.numerator, f.denominator
            head = {1: "pi", -1: "-pi"}.get(num, f"{num}*pi")
            return head if den == 1 else f"{head}/{den}"
    return f"{value:.17g}"


def _q(i: int) -> str:
    return f"q[{i}]"


def _statement(g) -> str:
    k = g.kind
    if k == "H":
        return f"h {_q(g.qubits[0])};"
    if k == "RY":
        return f"ry({format_angle(2 * g.angle)}) {_q(g.qubits[0])};"
    if k == "RZ":
        return f"rz({format_angle(2 * g.angle)}) {_q(g.qubits[0])};"
    if k == "PHASE":
        return f"u1({format_angle(g.angle)}) {_q(g.qubits[0])};"
    if k == "CNOT":
        return f"cx {_q(g.qubits[0])},{_q(g.qubits[1])};"
    if k == "CPHASE":
        return f"cu1({format_angle(g.angle)}) {_q(g.qubits[0])},{_q(g.qubits[1])};"
    if k == "SWAP":
        return f"swap {_q(g.qubits[0])},{_q(g.qubits[1])};"
    if k == "GPHASE":
        return f"{PRAGMA}gphase({format_angle(g.angle)});"
    raise LoweringRequiredError(f"{k} gates must be lowered before emission")


def emit(circuit: Circuit, measure: bool = False) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if circuit.label:
        lines.append("// " + " ".join(circuit.label.split()))
    lines.append(f"qreg q[{circuit.n_qubits}];")
    if measure:
        lines.append(f"creg c[{circuit.n_qubits}];")
    lines.extend(_statement(g) for g in circuit.gates)
    if measure:
        lines.extend(f"measure q[{i}] -> c[{i}];" for i in range(circuit.n_qubits))
    return "\n".join(lines) + "\n"


def write_qasm(circuit: Circuit, path, measure: bool = False) -> Path:
    path = Path(path)
    path.write_text(emit(circuit, measure), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# lexing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<header>OPENQASM)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<id>[a-z][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<op>[-+*/()\[\],;])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line, offset = raw, 0
        stripped = raw.lstrip()
        if stripped.startswith(PRAGMA):
            offset = len(raw) - len(stripped) + len(PRAGMA)
            line = raw[offset:]
        else:
            cut = raw.find("//")
            if cut >= 0:
                line = raw[:cut]
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if m is None:
                raise QasmSyntaxError(f"unexpected character {line[pos]!r}", lineno, offset + pos + 1)
            if m.lastgroup != "ws":
                tokens.append(Token(m.lastgroup, m.group(), lineno, offset + pos + 1))
            pos = m.end()
    last = text.count("\n") + 1
    tokens.append(Token("eof", "", last, 1))
    return tokens


# ---------------------------------------------------------------------------
# parsing

# name -> (parameter count, qubit count, builder(params, qubits))
GATES = {
    "h": (0, 1, lambda p, q: H(q[0])),
    "ry": (1, 1, lambda p, q: RY(p[0] / 2, q[0])),
    "rz": (1, 1, lambda p, q: RZ(p[0] / 2, q[0])),
    "u1": (1, 1, lambda p, q: Phase(p[0], q[0])),
    "cx": (0, 2, lambda p, q: CNOT(q[0], q[1])),
    "cu1": (1, 2, lambda p, q: ControlledPhase(p[0], q[0], q[1])),
    "swap": (0, 2, lambda p, q: SWAP(q[0], q[1])),
    "gphase": (1, 0, lambda p, q: GlobalPhase(p[0])),
}


@dataclass
class QasmProgram:
    version: str
    qreg: tuple[str, int]
    creg: tuple[str, int] | None
    circuit: Circuit
    measurements: list[tuple[int, int]] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, tok: Token | None = None, cls=QasmSyntaxError):
        tok = tok or self.tok
        raise cls(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            self.fail(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.fail(f"expected {what}, found {found!r}")
        return self.advance()

    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    def expr(self) -> float:
        value = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                value *= rhs
            else:
                if rhs == 0:
                    self.fail("division by zero", op)
                value /= rhs
        return value

    def unary(self) -> float:
        if self.tok.text == "-":
            self.advance()
            return -self.unary()
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.primary()

    def primary(self) -> float:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return float(t.text)
        if t.kind == "id" and t.text == "pi":
            self.advance()
            return math.pi
        if t.text == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        self.fail(f"expected an angle expression, found {t.text or 'end of input'!r}")

    def register_size(self) -> int:
        self.expect("[")
        size = self.expect_kind("number", "a register size")
        if not size.text.isdigit():
            self.fail("register size must be an integer", size)
        self.expect("]")
        return int(size.text)

    def declaration(self, keyword: str) -> tuple[str, int]:
        self.advance()
        name = self.expect_kind("id", "a register name").text
        size = self.register_size()
        self.expect(";")
        if size < 1:
            self.fail(f"{keyword} must have at least one bit")
        return name, size

    def argument(self, register: tuple[str, int] | None, what: str) -> int:
        name = self.expect_kind("id", f"a {what} argument")
        if register is None or name.text != register[0]:
            self.fail(f"undeclared {what} register {name.text!r}", name, UndeclaredRegisterError)
        self.expect("[")
        idx_tok = self.expect_kind("number", "an index")
        if not idx_tok.text.isdigit():
            self.fail("index must be an integer", idx_tok)
        self.expect("]")
        idx = int(idx_tok.text)
        if idx >= register[1]:
            self.fail(
                f"index {idx} out of range for {register[0]}[{register[1]}]",
                idx_tok,
                QubitIndexError,
            )
        return idx

    def parse(self) -> QasmProgram:
        self.expect("OPENQASM")
        version = self.expect_kind("number", "a version number")
        if version.text != "2.0":
            self.fail(f"unsupported OpenQASM version {version.text}", version)
        self.expect(";")
        if self.tok.text == "include":
            self.advance()
            self.expect_kind("string", "an include file name")
            self.expect(";")
        pending = []
        measurements = []
        while self.tok.kind != "eof":
            t = self.tok
            if t.text == "qreg":
                if self.qreg is not None:
                    self.fail("only one quantum register is supported")
                self.qreg = self.declaration("qreg")
            elif t.text == "creg":
                if self.creg is not None:
                    self.fail("only one classical register is supported")
                self.creg = self.declaration("creg")
            elif t.text == "measure":
                self.advance()
                q = self.argument(self.qreg, "quantum")
                self.expect_kind("arrow", "'->'")
                c = self.argument(self.creg, "classical")
                self.expect(";")
                measurements.append((q, c))
            elif t.kind == "id":
                pending.append(self.gate())
            else:
                self.fail(f"unexpected {t.text!r}")
        if self.qreg is None:
            self.fail("no quantum register declared")
        circuit = Circuit(self.qreg[1], pending)
        return QasmProgram("2.0", self.qreg, self.creg, circuit, measurements)

    def gate(self):
        name = self.advance()
        if name.text not in GATES:
            self.fail(f"unknown gate {name.text!r}", name, UnknownGateError)
        n_params, n_qubits, build = GATES[name.text]
        params = []
        if self.tok.text == "(":
            self.advance()
            if self.tok.text != ")":
                params.append(self.expr())
                while self.tok.text == ",":
                    self.advance()
                    params.append(self.expr())
            self.expect(")")
        if len(params) != n_params:
            self.fail(f"{name.text} takes {n_params} parameter(s), got {len(params)}", name)
        qubits = []
        for i in range(n_qubits):
            if i:
                self.expect(",")
            qubits.append(self.argument(self.qreg, "quantum"))
        if len(set(qubits)) != len(qubits):
            self.fail(f"{name.text} operands must be distinct", name)
        self.expect(";")
        return build(params, qubits)


def parse_program(text: str) -> QasmProgram:
    return _Parser(text).parse()


def parse(text: str) -> Circuit:
    return parse_program(text).circuit


def validate(text: str) -> QasmProgram:
    """Well-formedness check of an emitted file.

    Declarations precede use and indices are in range (both enforced by the
    parser); measurements target distinct classical bits; the file ends
    with a newline.
    """
    program = parse_program(text)
    if not text.endswith("\n"):
        last = text.count("\n") + 1
        raise QasmSyntaxError("file must end with a newline", last, len(text.split("\n")[-1]) + 1)
    targets = [c for _, c in program.measurements]
    if len(set(targets)) != len(targets):
        raise QasmSyntaxError("classical bit measured twice", 1, 1)
    return program
