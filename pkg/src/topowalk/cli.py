"""Command line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 unsupported construction,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .continuum import EvolutionParams, hamiltonian_for, kernel, trotter_circuit
from .errors import DomainError, UnsupportedError
from .qasm import write_qasm
from .scenarios import (
    ALIASES,
    BUILTIN_SCENARIOS,
    GATE_METHODS,
    ReportIOError,
    prepare,
    compiled_step,
    export_report,
    load_scenario,
    run_noisy,
    run_scenario,
)

EXIT_OK, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_IO = 0, 2, 3, 4


def _format(args) -> str:
    if args.format:
        return args.format
    return "json" if Path(args.out).suffix == ".json" else "csv"


def cmd_list(args) -> int:
    inverse = {}
    for alias, name in ALIASES.items():
        inverse.setdefault(name, []).append(alias)
    for name, s in BUILTIN_SCENARIOS.items():
        extra = f" (alias {', '.join(inverse[name])})" if name in inverse else ""
        print(f"{name}{extra}: {s.description}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    report = run_scenario(load_scenario(args.scenario))
    export_report(report, _format(args), args.out)
    return EXIT_OK


def cmd_noisy(args) -> int:
    s = load_scenario(args.scenario)
    methods = args.methods or [m for m in s.methods if m in GATE_METHODS]
    if not methods:
        raise DomainError(f"scenario {s.name} has no gate-level method to make noisy")
    if args.seed is not None:
        s.seed = args.seed
    report = run_noisy(s, args.shots, methods=methods, p=args.p)
    export_report(report, _format(args), args.out)
    return EXIT_OK


def cmd_emit(args) -> int:
    s = load_scenario(args.scenario)
    if args.kind == "step":
        circuit = compiled_step(s.walk_config())
    else:
        s.methods = ("trotter",)
        prep = prepare(s)
        t = args.t if args.t is not None else (s.time_grid[-1] if s.time_grid else 0.0)
        circuit = trotter_circuit(
            prep.hamiltonian, EvolutionParams(prep.scale * t, s.trotter_slices)
        )
    try:
        write_qasm(circuit, args.out, measure=args.measure)
    except OSError as e:
        raise ReportIOError(f"cannot write {args.out}: {e}") from e
    return EXIT_OK


def cmd_kernel(args) -> int:
    h = hamiltonian_for(args.hamiltonian, args.n)
    k = kernel(h, args.tol)
    print(
        json.dumps(
            {
                "hamiltonian": h.label,
                "dimension": k.dimension,
                "sites": k.sites(),
                "support": [float(v) for v in k.support],
            },
            indent=2,
        )
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topowalk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list-scenarios", help="list builtin scenarios").set_defaults(func=cmd_list)

    sim = sub.add_parser("simulate", help="run a scenario and write its report")
    sim.add_argument("--scenario", required=True, help="builtin name or JSON config path")
    sim.add_argument("--out", required=True)
    sim.add_argument("--format", choices=("csv", "json"))
    sim.set_defaults(func=cmd_simulate)

    noisy = sub.add_parser("noisy", help="Monte Carlo run with CNOT depolarizing noise")
    noisy.add_argument("--scenario", default="fig4")
    noisy.add_argument("--shots", type=int, default=1000)
    noisy.add_argument("--p", type=float, default=None, help="error probability per CNOT")
    noisy.add_argument("--seed", type=int, default=None)
    noisy.add_argument("--methods", nargs="+", choices=GATE_METHODS)
    noisy.add_argument("--out", required=True)
    noisy.add_argument("--format", choices=("csv", "json"))
    noisy.set_defaults(func=cmd_noisy)

    emit = sub.add_parser("emit-qasm", help="write a scenario circuit as OpenQASM 2.0")
    emit.add_argument("--scenario", required=True)
    emit.add_argument("--kind", choices=("step", "trotter"), default="step")
    emit.add_argument("--t", type=float, default=None, help="walk time for --kind trotter")
    emit.add_argument("--measure", action="store_true")
    emit.add_argument("--out", required=True)
    emit.set_defaults(func=cmd_emit)

    ker = sub.add_parser("kernel", help="zero modes of a continuum Hamiltonian")
    ker.add_argument("--hamiltonian", default="I/II", choices=("I", "II", "III", "IV", "I/II"))
    ker.add_argument("--n", type=int, default=2)
    ker.add_argument("--tol", type=float, default=1e-9)
    ker.set_defaults(func=cmd_kernel)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ReportIOError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
