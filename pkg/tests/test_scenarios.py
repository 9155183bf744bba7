import json

import numpy as np
import pytest

from topowalk.errors import UnsupportedError
from topowalk.scenarios import (
    ALIASES,
    BUILTIN_SCENARIOS,
    InitialSpec,
    Scenario,
    ScenarioError,
    ScenarioReport,
    ReportIOError,
    export_report,
    get_scenario,
    load_report,
    load_scenario,
    run_noisy,
    run_scenario,
)
from topowalk.walkgen import WalkConfig


def small(**kw):
    base = dict(
        name="small", n_walker=2, phase_config="I", epsilon=1 / 8,
        initial=InitialSpec(0, 1), time_grid=[0.0, 1.0, 2.0],
    )
    base.update(kw)
    return Scenario(**base)


def test_builtins_validate_and_aliases_resolve():
    for name in BUILTIN_SCENARIOS:
        get_scenario(name).validate()
    for alias, target in ALIASES.items():
        assert get_scenario(alias).name == target


def test_get_scenario_returns_a_copy():
    s = get_scenario("fig1")
    s.seed = 99
    assert BUILTIN_SCENARIOS["fig1"].seed == 0


@pytest.mark.parametrize(
    "change",
    [
        {"time_grid": [1.0, 0.5]},
        {"time_grid": [-1.0]},
        {"methods": ()},
        {"methods": ("magic",)},
        {"noise_p": 1.0},
        {"phase_config": "V"},
        {"initial": InitialSpec(2, 0)},
        {"initial": InitialSpec(0, 4)},
        {"trotter_slices": 0},
        {"epsilon": 0.0},
    ],
)
def test_invalid_scenarios(change):
    with pytest.raises(ScenarioError):
        small(**change).validate()


def test_explicit_coin_angles_only_for_discrete():
    cfg = WalkConfig(2, 0.1, 0.2, 0.3, 0.4, epsilon=0.1)
    with pytest.raises(ScenarioError):
        small(phase_config=cfg).validate()
    report = run_scenario(small(phase_config=cfg, methods=("discrete",)))
    assert report.methods == ["discrete"]


def test_report_shapes_and_csv_rows():
    s = small()
    r = run_scenario(s)
    assert r.methods == ["exact", "trotter", "discrete"]
    for d in r.distributions.values():
        assert d.shape == (3, 4)
        np.testing.assert_allclose(d.sum(axis=1), 1, atol=1e-12)
    lines = r.to_csv().splitlines()
    assert lines[0] == "t,method,x,p"
    assert len(lines) == 1 + 3 * 3 * 4
    assert set(r.deviations) == {"exact-trotter", "exact-discrete", "trotter-discrete"}


def test_empty_grid_gives_header_only():
    r = run_scenario(small(time_grid=[]))
    assert r.to_csv() == "t,method,x,p\n"


def test_run_is_deterministic():
    assert run_scenario(get_scenario("fig7")).to_json() == run_scenario(get_scenario("fig7")).to_json()


def test_json_round_trip(tmp_path):
    r = run_scenario(small())
    path = export_report(r, "json", tmp_path / "r.json")
    back = load_report(path)
    assert back == r
    assert json.loads(path.read_text())["metadata"]["sign_resolution"] == -1


def test_export_errors(tmp_path):
    r = run_scenario(small(time_grid=[0.0]))
    with pytest.raises(ScenarioError):
        export_report(r, "xml", tmp_path / "r.xml")
    with pytest.raises(ReportIOError):
        export_report(r, "csv", tmp_path / "missing" / "r.csv")


def test_scenario_dict_round_trip(tmp_path):
    s = small(methods=("exact", "discrete"))
    path = tmp_path / "s.json"
    path.write_text(json.dumps(s.to_dict()))
    assert load_scenario(str(path)).to_dict() == s.to_dict()


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario("nope")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ScenarioError):
        load_scenario(str(bad))
    bad.write_text(json.dumps({"name": "x"}))
    with pytest.raises(ScenarioError):
        load_scenario(str(bad))


def test_unsupported_boundary_size():
    with pytest.raises(UnsupportedError):
        run_scenario(small(n_walker=4, phase_config="I/II"))


def test_bound_initial_state_at_boundary():
    r = run_scenario(get_scenario("fig2"))
    assert r.distributions["exact"][:, 3].min() == pytest.approx(1, abs=1e-9)


def test_noise_free_noisy_run_equals_noiseless():
    s = small(methods=("trotter", "discrete"))
    clean = run_scenario(s)
    noisy = run_noisy(s, shots=3, p=0.0)
    for m in ("trotter", "discrete"):
        np.testing.assert_array_equal(noisy.distributions[m], clean.distributions[m])
        np.testing.assert_array_equal(noisy.stderr[m], 0)


def test_noisy_rejects_exact_and_bad_shots():
    with pytest.raises(UnsupportedError):
        run_noisy(small(), shots=2)
    with pytest.raises(ScenarioError):
        run_noisy(small(methods=("discrete",)), shots=0)


def test_noisy_seed_reproducible_and_prefix_stable():
    s = get_scenario("fig4")
    a = run_noisy(s, shots=20)
    b = run_noisy(s, shots=20)
    assert a == b
    assert a.metadata["noise"]["p"] == 0.04


def test_report_from_dict_keeps_method_order():
    r = run_scenario(small())
    assert ScenarioReport.from_dict(r.to_dict()).methods == r.methods
