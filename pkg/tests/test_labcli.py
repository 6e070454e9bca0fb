import hashlib
import json
import math

import pytest

from blowup_lab import regions
from blowup_lab.errors import FitError
from blowup_lab.labcli import checks, runs
from blowup_lab.labcli.cli import main, parse_csv
from blowup_lab.labcli.config import ConfigError, GridSpec, load_config
from blowup_lab.labcli.presets import PRESETS
from blowup_lab.regions import SystemParams

from oracles import critical_q_flat


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out)])
    return code, out


def test_classify_fig_a(tmp_path, capsys):
    code, out = run(tmp_path, "classify", "--preset", "fig-a")
    assert code == 0
    assert "Omega=0.75" in capsys.readouterr().out
    header, rows = parse_csv((out / "classify.csv").read_text())
    row = dict(zip(header, rows[0]))
    assert float(row["omega"]) == 0.75 and row["branch"] == "Subcritical"


def test_classify_fig_e_is_critical(tmp_path, capsys):
    code, _ = run(tmp_path, "classify", "--preset", "fig-e")
    assert code == 0
    text = capsys.readouterr().out
    assert "Omega=0 " in text and "branch=Critical" in text


def test_hypothesis_violation_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, {"preset": "fig-a", "params": {"nu1_sq": 10.0}})
    code, _ = run(tmp_path, "classify", "--config", cfg)
    assert code == 2
    assert "delta1" in capsys.readouterr().err


def test_runtime_failure_exit_code(tmp_path):
    assert run(tmp_path, "classify", "--preset", "fig-z")[0] == 1
    assert run(tmp_path, "classify", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_config_precedence(tmp_path):
    cfg = write_config(tmp_path, {"preset": "fig-a", "params": {"eps": 0.05}, "out": "from_file"})
    c = load_config("integrate", cfg)
    assert c.params.eps == 0.05 and c.params.mu1 == 4.0
    assert str(c.out) == "from_file"
    c = load_config("integrate", cfg, preset="fig-c", out=tmp_path / "cli")
    assert c.params.mu1 == 0.0 and c.params.eps == 0.05 and c.out == tmp_path / "cli"
    with pytest.raises(ConfigError):
        load_config("integrate")
    with pytest.raises(ConfigError):
        load_config("integrate", write_config(tmp_path, {"preset": "fig-a", "params": {"bogus": 1}}, "b.json"))


def test_integrate_writes_trajectory_and_manifest(tmp_path):
    code, out = run(tmp_path, "integrate", "--preset", "fig-c")
    assert code == 0
    manifest = json.loads((out / "run.json").read_text())
    assert manifest["config"]["params"]["mu1"] == 0.0
    for name, digest in manifest["artifacts"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    header, rows = parse_csv((out / "blowup.csv").read_text())
    row = dict(zip(header, rows[0]))
    assert row["termination"] == "ThresholdCrossed"
    assert float(row["reported_time"]) == pytest.approx(8, rel=0.15)


@pytest.mark.parametrize("cmd", ["classify", "integrate", "sweep", "region-grid"])
@pytest.mark.parametrize("name", ["fig-a", "fig-d"])
def test_determinism(tmp_path, cmd, name):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main([cmd, "--preset", name, "--out", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]


def test_csv_round_trip(tmp_path):
    _, out = run(tmp_path, "sweep", "--preset", "fig-a")
    header, rows = parse_csv((out / "sweep.csv").read_text())
    assert header == ["eps", "t_b", "termination"]
    report = runs.run_sweep(SystemParams(**PRESETS["fig-a"]["params"]), [0.1, 0.01], 1e6, (1e6, 1e8, 1e10),
                            (1e-8, 1e-12))
    assert [(float(a), float(b), c) for a, b, c in rows] == [(r.eps, r.t_b, r.termination) for r in report.rows]


def test_sweep_report(tmp_path):
    sp = SystemParams(**PRESETS["fig-a"]["params"])
    rep = runs.run_sweep(sp, [0.01, 0.1, 0.03], 1e6, (1e6, 1e8, 1e10), (1e-8, 1e-12), workers=2)
    assert [r.eps for r in rep.rows] == [0.1, 0.03, 0.01]
    assert rep.theoretical_omega == 0.75
    rows = {r.eps: r.t_b for r in rep.rows}
    slope = math.log(rows[0.01] / rows[0.1]) / math.log(10)
    assert rep.fit_subcritical.r2 > 0.99
    assert rep.fit_subcritical.slope == pytest.approx(slope, rel=0.05)


def test_sweep_degenerate_abscissa():
    sp = SystemParams(**PRESETS["fig-a"]["params"])
    with pytest.raises(FitError, match="degenerate abscissa"):
        runs.run_sweep(sp, [0.1, 0.1, 0.1], 1e6, (1e6,), (1e-8, 1e-12))


def test_sweep_all_runs_failed(tmp_path):
    sp = SystemParams(**PRESETS["fig-e"]["params"])
    with pytest.raises(runs.AllRunsFailed):
        runs.run_sweep(sp, [0.1, 0.01], 1e3, (1e6,), (1e-8, 1e-12))
    cfg = write_config(tmp_path, {"preset": "fig-e", "horizon": 1e3})
    assert run(tmp_path, "sweep", "--config", cfg)[0] == 1


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("BLOWUP_LAB_THREADS", "3")
    assert runs.thread_cap() == 3
    monkeypatch.setenv("BLOWUP_LAB_THREADS", "junk")
    assert runs.thread_cap() >= 1


def test_region_grid_contains_fig_a_cell(tmp_path):
    grid = {"p_min": 1.5, "p_max": 2.5, "q_min": 1.25, "q_max": 1.75, "resolution": 3}
    cfg = write_config(tmp_path, {"preset": "fig-a", "grid": grid})
    code, out = run(tmp_path, "region-grid", "--config", cfg)
    assert code == 0
    header, rows = parse_csv((out / "region_grid.csv").read_text())
    cells = {(float(r[0]), float(r[1])): dict(zip(header, r)) for r in rows}
    assert len(cells) == 9
    assert float(cells[(2.0, 1.5)]["omega"]) == 0.75


def test_region_grid_diagonal_symmetry():
    sp = SystemParams(2, 0.5, 1.0, 1.0, 0.0, 0.0, 2.0, 2.0)
    for p, q, l1, l2, *_ in runs.region_grid(sp, GridSpec(1.1, 3.0, 1.1, 3.0, 11)):
        if p == q:
            assert l1 == l2


def test_region_grid_zero_level_matches_critical_curve():
    sp = SystemParams(2, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0)
    rows = runs.region_grid(sp, GridSpec(1.05, 4.0, 1.05, 4.0, 40))
    for p, q, _, _, om, _ in rows:
        qc = critical_q_flat(p)
        if abs(q - qc) > 1e-9:
            assert (om > 0) == (q < qc)
    # sampled points on the curve sit on Omega = 0
    for p in (2.2, 3.0, 3.7):
        cls = regions.omega(SystemParams(2, 0.0, 0.0, 0.0, 0.0, 0.0, p, critical_q_flat(p)))
        assert abs(cls.omega) < 1e-9


def test_grid_validation():
    with pytest.raises(ConfigError):
        GridSpec(0.9, 2, 1.1, 2, 5).validate()
    with pytest.raises(ConfigError):
        GridSpec(1.1, 2, 1.1, 2, 1).validate()


def test_verify_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify")
    assert code == 0
    header, rows = parse_csv((out / "verify.csv").read_text())
    assert all(r[header.index("passed")] == "true" for r in rows)
    assert all(float(r[header.index("margin")]) >= 0 for r in rows)


def test_verify_self_test_fails(tmp_path):
    code, out = run(tmp_path, "verify", "--self-test")
    assert code == 3
    _, rows = parse_csv((out / "verify.csv").read_text())
    failed = [r[0] for r in rows if r[-1] == "false"]
    assert failed == ["rho_ode_residual[fault]"]


def test_limit_check_flat_panel():
    res = checks.rho_limit(ms=(0.0,), etas=(1.0,), mus=(0.0,))
    assert res.passed
