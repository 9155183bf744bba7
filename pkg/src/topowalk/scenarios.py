"""Scenario runner: exact, Trotterized and discrete-walk evolution side by side.

Time ``t`` in a scenario is walk time, tied to the number of steps by
s * eps = t / 2.  The continuum methods evolve the stored Hamiltonian for
``scale * t``, where ``scale`` is fitted between the Hamiltonian and the
generator of four walk steps (``continuum.fit_time_scale``).  The fit, its
residual and the step rounding go into the report metadata.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from itertools import combinations
from pathlib import Path

import numpy as np

from .continuum import (
    SIGN_RESOLUTION,
    EvolutionParams,
    bound_eigenstate,
    evolve_exact,
    hamiltonian_for,
    hamiltonian_walk_fit,
    steps_for_time,
    trotter_circuit,
)
from .errors import DomainError, TopowalkError, UnsupportedError
from .noise import TrajectoryBatch, mean_and_stderr, shot_rngs
from .simcore import (
    Circuit,
    State,
    basis_state,
    lower_to_cnot,
    position_distribution,
    run_circuit_array,
)
from .walkgen import PHASE_PRESETS, TWO_PHASE_PRESETS, WalkConfig, walk_step_circuit

METHODS = ("exact", "trotter", "discrete")
GATE_METHODS = ("trotter", "discrete")
PRESETS = tuple(PHASE_PRESETS) + tuple(TWO_PHASE_PRESETS)


class ScenarioError(DomainError):
    """Invalid scenario configuration."""


class ReportIOError(TopowalkError, OSError):
    pass


@dataclass(frozen=True)
class InitialSpec:
    """Coin basis bit (0 or 1) or "bound" for a zero mode, plus the site."""

    coin: int | str = 0
    site: int = 0


@dataclass
class Scenario:
    name: str
    n_walker: int
    phase_config: str | WalkConfig
    epsilon: float
    initial: InitialSpec
    time_grid: list[float]
    trotter_slices: int = 8
    noise_p: float = 0.0
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    step_multiple: int = 4
    description: str = ""

    def validate(self) -> None:
        if self.n_walker < 1:
            raise ScenarioError(f"{self.name}: n_walker must be >= 1")
        grid = list(self.time_grid)
        if any(t < 0 for t in grid) or any(b < a for a, b in zip(grid, grid[1:])):
            raise ScenarioError(f"{self.name}: time grid must be non-negative and ascending")
        if not self.methods or set(self.methods) - set(METHODS):
            raise ScenarioError(f"{self.name}: methods must be a non-empty subset of {METHODS}")
        if not 0 <= self.noise_p < 1:
            raise ScenarioError(f"{self.name}: noise_p must lie in [0, 1)")
        if self.trotter_slices < 1 or self.step_multiple < 1:
            raise ScenarioError(f"{self.name}: trotter_slices and step_multiple must be >= 1")
        if isinstance(self.phase_config, str):
            if self.phase_config not in PRESETS:
                raise ScenarioError(f"{self.name}: unknown phase preset {self.phase_config!r}")
        else:
            if self.phase_config.n_walker != self.n_walker:
                raise ScenarioError(f"{self.name}: config lattice size differs from n_walker")
            if self.needs_hamiltonian:
                raise ScenarioError(
                    f"{self.name}: explicit coin angles only support the discrete method "
                    "with a basis initial state"
                )
        if "discrete" in self.methods and self.epsilon <= 0:
            raise ScenarioError(f"{self.name}: the discrete method needs epsilon > 0")
        coin = self.initial.coin
        if coin not in (0, 1, "bound"):
            raise ScenarioError(f"{self.name}: initial coin must be 0, 1 or 'bound'")
        if not 0 <= self.initial.site < 2**self.n_walker:
            raise ScenarioError(f"{self.name}: initial site outside the lattice")

    @property
    def needs_hamiltonian(self) -> bool:
        return bool({"exact", "trotter"} & set(self.methods)) or self.initial.coin == "bound"

    def walk_config(self) -> WalkConfig:
        if isinstance(self.phase_config, WalkConfig):
            return self.phase_config
        return WalkConfig.preset(self.phase_config, self.n_walker, self.epsilon)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["initial"] = asdict(self.initial)
        d["time_grid"] = [float(t) for t in self.time_grid]
        d["methods"] = list(self.methods)
        if isinstance(self.phase_config, WalkConfig):
            d["phase_config"] = asdict(self.phase_config)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            d = dict(d)
            pc = d["phase_config"]
            if isinstance(pc, dict):
                d["phase_config"] = WalkConfig(**pc)
            d["initial"] = InitialSpec(**d.get("initial", {}))
            d["time_grid"] = [float(t) for t in d["time_grid"]]
            if "methods" in d:
                d["methods"] = tuple(d["methods"])
            s = cls(**d)
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"invalid scenario description: {e}") from e
        s.validate()
        return s


def _grid(stop: float, step: float) -> list[float]:
    return [round(k * step, 12) for k in range(int(round(stop / step)) + 1)]


BUILTIN_SCENARIOS = {
    "fig1": Scenario(
        "fig1", 3, "I", 1 / 8, InitialSpec(0, 3), _grid(4, 1),
        description="phase I, N=8, eps=1/8, start at x=3",
    ),
    "fig2": Scenario(
        "fig2", 3, "I/II", 1 / 8, InitialSpec("bound", 3), _grid(4, 1),
        description="phases I/II, N=8, eps=1/8, bound start at the boundary x=3",
    ),
    "fig4": Scenario(
        "fig4", 2, "I/II", 1 / 8, InitialSpec("bound", 1), [0.0, 0.25],
        noise_p=0.04, methods=("discrete",), step_multiple=1,
        description="one step W, phases I/II, N=4, eps=1/8, bound start at x=1",
    ),
    "fig5": Scenario(
        "fig5", 2, "I/II", 1 / 32, InitialSpec("bound", 1), _grid(4, 0.5),
        noise_p=0.04,
        description="scaling limit, phases I/II, N=4, eps=1/32, bound start at x=1",
    ),
    "fig7": Scenario(
        "fig7", 2, "I", 1 / 32, InitialSpec(0, 1), _grid(4, 0.5),
        noise_p=0.04,
        description="scaling limit, phase I, N=4, eps=1/32, start at x=1",
    ),
}
ALIASES = {"fig3": "fig4", "fig6": "fig5", "fig8": "fig7"}


def get_scenario(name: str) -> Scenario:
    key = ALIASES.get(name, name)
    if key not in BUILTIN_SCENARIOS:
        raise ScenarioError(f"no builtin scenario {name!r}")
    return copy.deepcopy(BUILTIN_SCENARIOS[key])


def load_scenario(source: str) -> Scenario:
    """Builtin name or path to a JSON file mirroring the Scenario fields."""
    if source in BUILTIN_SCENARIOS or source in ALIASES:
        return get_scenario(source)
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ScenarioError(f"{source!r} is neither a builtin scenario nor a readable file") from e
    except OSError as e:
        raise ReportIOError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON: {e}") from e
    return Scenario.from_dict(data)


# ---------------------------------------------------------------------------
# report


@dataclass(eq=False)
class ScenarioReport:
    scenario: dict
    times: list[float]
    distributions: dict[str, np.ndarray]  # method -> (len(times), N)
    deviations: dict[str, dict[str, list[float]]]
    stderr: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def methods(self) -> list[str]:
        return list(self.distributions)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "times": [float(t) for t in self.times],
            "methods": self.methods,
            "distributions": {k: np.asarray(v).tolist() for k, v in self.distributions.items()},
            "stderr": {k: np.asarray(v).tolist() for k, v in self.stderr.items()},
            "deviations": self.deviations,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioReport":
        order = d.get("methods", list(d["distributions"]))
        return cls(
            scenario=d["scenario"],
            times=list(d["times"]),
            distributions={k: np.array(d["distributions"][k], dtype=float) for k in order},
            deviations=d["deviations"],
            stderr={k: np.array(v, dtype=float) for k, v in d.get("stderr", {}).items()},
            metadata=d["metadata"],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioReport):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(
            other.to_dict(), sort_keys=True
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "method", "x", "p"])
        for i, t in enumerate(self.times):
            for method in self.methods:
                for x, p in enumerate(self.distributions[method][i]):
                    w.writerow([repr(float(t)), method, x, repr(float(p))])
        return buf.getvalue()


def export_report(report: ScenarioReport, fmt: str, path) -> Path:
    if fmt not in ("csv", "json"):
        raise ScenarioError(f"unknown report format {fmt!r}")
    text = report.to_csv() if fmt == "csv" else report.to_json()
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"cannot write report to {path}: {e}") from e
    return path


def load_report(path) -> ScenarioReport:
    path = Path(path)
    try:
        return ScenarioReport.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except OSError as e:
        raise ReportIOError(f"cannot read report {path}: {e}") from e


# ---------------------------------------------------------------------------
# running


@dataclass
class Prepared:
    scenario: Scenario
    config: WalkConfig
    hamiltonian: object
    scale: float
    initial: State
    metadata: dict


def prepare(s: Scenario) -> Prepared:
    """Validate, build the walk config, Hamiltonian, time scale and initial state."""
    s.validate()
    config = s.walk_config()
    meta: dict = {
        "walk_config": asdict(config),
        "sign_resolution": SIGN_RESOLUTION,
    }
    h, scale = None, None
    if s.needs_hamiltonian:
        try:
            h = hamiltonian_for(s.phase_config, s.n_walker)
        except UnsupportedError as e:
            raise UnsupportedError(f"scenario {s.name}: {e}") from e
        fit = hamiltonian_walk_fit(s.phase_config, s.n_walker)
        scale = fit.scale
        meta["hamiltonian"] = {
            "label": h.label,
            "terms": [[t.coeff, t.letters] for t in h.terms],
        }
        meta["time_scale"] = {"sign": fit.sign, "scale": fit.scale, "residual": fit.residual}
    if s.initial.coin == "bound":
        initial = bound_eigenstate(h, s.initial.site)
    else:
        initial = basis_state(s.n_walker, s.initial.coin, s.initial.site)
    return Prepared(s, config, h, scale, initial, meta)


def _step_schedule(s: Scenario) -> tuple[list[int], list[float]]:
    steps, exact = [], []
    for t in s.time_grid:
        k, e = steps_for_time(t, s.epsilon, s.step_multiple)
        steps.append(k)
        exact.append(e)
    return steps, exact


def compiled_step(config: WalkConfig) -> Circuit:
    """Gate-level W in the CNOT basis, the circuit that the discrete method runs."""
    return lower_to_cnot(walk_step_circuit(config, cancel=True))


def _deviations(dists: dict[str, np.ndarray]) -> dict[str, dict[str, list[float]]]:
    out = {}
    for a, b in combinations(dists, 2):
        diff = np.abs(np.asarray(dists[a]) - np.asarray(dists[b]))
        out[f"{a}-{b}"] = {
            "linf": [float(v) for v in diff.max(axis=1)] if diff.size else [],
            "l1": [float(v) for v in diff.sum(axis=1)] if diff.size else [],
        }
    return out


def _empty(n_walker: int) -> np.ndarray:
    return np.zeros((0, 2**n_walker))


def run_scenario(s: Scenario) -> ScenarioReport:
    prep = prepare(s)
    meta = prep.metadata
    dists: dict[str, np.ndarray] = {}
    ordered = [m for m in METHODS if m in s.methods]
    if "exact" in ordered:
        rows = [
            position_distribution(evolve_exact(prep.hamiltonian, prep.initial, prep.scale * t))
            for t in s.time_grid
        ]
        dists["exact"] = np.array(rows) if rows else _empty(s.n_walker)
    if "trotter" in ordered:
        rows = []
        for t in s.time_grid:
            circ = trotter_circuit(prep.hamiltonian, EvolutionParams(prep.scale * t, s.trotter_slices))
            amps = run_circuit_array(prep.initial.amps, circ)
            rows.append(position_distribution(State(s.n_walker, amps)))
        dists["trotter"] = np.array(rows) if rows else _empty(s.n_walker)
    if "discrete" in ordered:
        steps, exact_steps = _step_schedule(s)
        meta["steps"] = steps
        meta["steps_unrounded"] = exact_steps
        step = compiled_step(prep.config)
        amps, done, rows = prep.initial.amps, 0, []
        for k in steps:
            for _ in range(k - done):
                amps = run_circuit_array(amps, step)
            done = k
            rows.append(position_distribution(State(s.n_walker, amps)))
        dists["discrete"] = np.array(rows) if rows else _empty(s.n_walker)
    if prep.scale is not None:
        meta["hamiltonian_times"] = [prep.scale * t for t in s.time_grid]
    return ScenarioReport(
        scenario=s.to_dict(),
        times=list(s.time_grid),
        distributions=dists,
        deviations=_deviations(dists),
        metadata=meta,
    )


def run_noisy(
    s: Scenario, shots: int, methods=None, p: float | None = None
) -> ScenarioReport:
    """Monte Carlo average over ``shots`` trajectories with CNOT depolarizing noise."""
    methods = tuple(methods) if methods is not None else tuple(s.methods)
    if "exact" in methods:
        raise UnsupportedError(
            f"scenario {s.name}: noise attaches to gates; the exact method cannot be noisy"
        )
    if shots < 1:
        raise ScenarioError("shots must be >= 1")
    noise_p = s.noise_p if p is None else p
    s = Scenario(**{**{f.name: getattr(s, f.name) for f in fields(s)}, "methods": methods, "noise_p": noise_p})
    prep = prepare(s)
    meta = prep.metadata
    meta["noise"] = {"p": noise_p, "shots": shots, "seed": s.seed, "channel": "two-qubit depolarizing after CNOT"}
    rngs = shot_rngs(s.seed, shots)
    m = s.n_walker + 1
    batch = TrajectoryBatch(prep.initial.amps, m, shots, noise_p, rngs)
    dists, errs = {}, {}
    ordered = [x for x in GATE_METHODS if x in methods]
    if "trotter" in ordered:
        means, ses = [], []
        for t in s.time_grid:
            batch.reset(prep.initial.amps)
            circ = trotter_circuit(prep.hamiltonian, EvolutionParams(prep.scale * t, s.trotter_slices))
            batch.apply(circ)
            mu, se = mean_and_stderr(batch.distributions())
            means.append(mu)
            ses.append(se)
        dists["trotter"] = np.array(means) if means else _empty(s.n_walker)
        errs["trotter"] = np.array(ses) if ses else _empty(s.n_walker)
    if "discrete" in ordered:
        steps, exact_steps = _step_schedule(s)
        meta["steps"] = steps
        meta["steps_unrounded"] = exact_steps
        step = compiled_step(prep.config)
        batch.reset(prep.initial.amps)
        done, means, ses = 0, [], []
        for k in steps:
            batch.apply(step, repeats=k - done)
            done = k
            mu, se = mean_and_stderr(batch.distributions())
            means.append(mu)
            ses.append(se)
        dists["discrete"] = np.array(means) if means else _empty(s.n_walker)
        errs["discrete"] = np.array(ses) if ses else _empty(s.n_walker)
    if prep.scale is not None:
        meta["hamiltonian_times"] = [prep.scale * t for t in s.time_grid]
    return ScenarioReport(
        scenario=s.to_dict(),
        times=list(s.time_grid),
        distributions=dists,
        deviations=_deviations(dists),
        stderr=errs,
        metadata=meta,
    )
