import csv
import json
import os

import numpy as np
import pytest

from gehm.config import config_from_dict
from gehm.errors import ConfigError
from gehm.experiment import (
    OUTPUT_ENV,
    build_graph,
    compute_spectrum,
    monte_carlo_regimes,
    parameter_sweep,
    resolve_output_dir,
    run_experiment,
    run_replicates,
    topology_comparison,
)
from gehm.graph import GraphModelSpec

QUIET_SIM = {"noise": {"sigma": 0.0}, "ou": {"xi": 0.0}}


def tiny(**over):
    raw = {
        "seed": 3,
        "graph": {"model": "erdos_renyi", "n": 8, "prob": 0.6, "normalization": "row"},
        "sim": {"horizon": 0.01, "snapshot_stride": 5},
        "replicates": 1,
    }
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(raw.get(k), dict):
            raw[k] = {**raw[k], **v}
        else:
            raw[k] = v
    return config_from_dict(raw)


def complete_cfg(n=5, **sim):
    return config_from_dict(
        {
            "seed": 1,
            "graph": {"model": "erdos_renyi", "n": n, "prob": 1.0, "normalization": "none"},
            "sim": {"p": 2.0, "eps": 0.0, "horizon": 1.0, "snapshot_stride": 20, **QUIET_SIM, **sim},
            "replicates": 4,
        }
    )


def data_files(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            if f != "manifest.json":
                p = os.path.join(dirpath, f)
                out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


def test_tiny_run_outputs_and_rerun_identical(tmp_path):
    cfg = tiny()
    s = run_experiment(cfg, out_dir=tmp_path / "a")
    run_experiment(cfg, out_dir=tmp_path / "b")
    files = data_files(tmp_path / "a")
    assert "trajectories/replicate_0001.csv" in files
    assert {"summary.json", "regime.json", "spectrum.json", "summary_timeseries.csv"} <= set(files)
    assert files == data_files(tmp_path / "b")
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"] == cfg.tree and "library_version" in manifest and "created" in manifest
    assert 0.0 <= s.blowup_fraction <= 1.0


def test_csv_headers_name_conventions(tmp_path):
    run_experiment(tiny(), out_dir=tmp_path)
    for name in ("trajectories/replicate_0001.csv", "summary_timeseries.csv", "survival.csv"):
        head = (tmp_path / name).read_text().splitlines()[:4]
        text = "\n".join(head)
        assert "directed edges" in text and "unordered edges" in text and "gamma basis" in text


def test_trajectory_csv_columns(tmp_path):
    run_experiment(tiny(), out_dir=tmp_path)
    rows = [r for r in csv.reader(open(tmp_path / "trajectories/replicate_0001.csv")) if not r[0].startswith("#")]
    assert rows[0] == ["t", "l2_norm_sq", "energy_p", "x"]
    assert len(rows) == 1 + 11
    side = json.loads((tmp_path / "trajectories/replicate_0001.json").read_text())
    assert side["status"] == "completed" and side["t_star"] is None


def test_reference_defaults_run(tmp_path):
    cfg = config_from_dict({"outputs": {"snapshots": False}, "replicates": 1})
    s = run_experiment(cfg, out_dir=tmp_path)
    d = json.loads((tmp_path / "summary.json").read_text())
    assert set(d["gamma_by_basis"]) == {"raw_adjacency", "normalized_W"}
    assert d["lambda_p"] > 0 and d["n_replicates"] == 1
    assert s.times[-1] == pytest.approx(10.0)


def test_unwritable_output_fails_before_simulation(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        run_experiment(tiny(), out_dir=blocker / "sub")


def test_output_dir_resolution(monkeypatch, tmp_path):
    cfg = tiny()
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    assert str(resolve_output_dir(cfg)) == cfg.output_dir
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    assert resolve_output_dir(cfg) == tmp_path
    assert str(resolve_output_dir(cfg, "x")) == "x"


def test_replicate_independent_of_ensemble_size():
    cfg3 = tiny(replicates=3, sim={"horizon": 0.05})
    cfg1 = tiny(replicates=1, sim={"horizon": 0.05})
    g = build_graph(cfg3)
    r3 = run_replicates(cfg3, g)
    r1 = run_replicates(cfg1, g)
    assert [r.seed for r in r3] == [4, 5, 6]
    assert np.array_equal(r1[0].trajectory.l2_norm_sq, r3[0].trajectory.l2_norm_sq)
    assert not np.array_equal(r3[0].trajectory.x_path, r3[1].trajectory.x_path)


def test_worker_count_does_not_change_outputs(tmp_path):
    cfg = tiny(replicates=4, sim={"horizon": 0.05})
    run_experiment(cfg, out_dir=tmp_path / "one", workers=1)
    run_experiment(cfg, out_dir=tmp_path / "many", workers=3)
    assert data_files(tmp_path / "one") == data_files(tmp_path / "many")


def test_ou_variance_with_u_frozen():
    cfg = tiny(replicates=100, sim={"horizon": 200.0, "evolve_u": False, "snapshot_stride": 0})
    s = run_experiment(cfg, write=False)
    sel = s.times >= 50
    assert np.mean(s.var_x[sel]) == pytest.approx(0.1**2 / (2 * 0.3), rel=0.05)


def test_regime_grid_spans_classes(tmp_path):
    cfg = complete_cfg(5)
    g = build_graph(cfg)
    spec = compute_spectrum(cfg, g)
    # complete graph K5: dominant Laplacian eigenvalue 5, adjacency radius 4
    assert spec.lambda_p == pytest.approx(5.0, abs=1e-6) and spec.gamma == pytest.approx(4.0, abs=1e-8)
    base = spec.lambda_p - spec.gamma
    table = monte_carlo_regimes(cfg, [base - 2, base, base + 2], out_dir=tmp_path)
    regimes = [r["regime"] for r in table.rows]
    assert regimes == ["dissipative", "critical", "amplifying"]
    rows = [r for r in csv.reader(open(tmp_path / "regimes.csv")) if not r[0].startswith("#")]
    assert len(rows) == 4 and rows[0][:3] == ["C_F", "R", "regime"]


def test_regime_zero_dynamics_and_explosive():
    cfg = complete_cfg(5, horizon=3.0)
    table = monte_carlo_regimes(cfg, [-3.0, 8.0], write=False)
    low, high = table.rows
    assert low["blowup_fraction"] == 0.0 and low["mean_fitted_rate"] < 0
    assert high["blowup_fraction"] == 1.0 and np.isfinite(high["mean_t_star"])
    assert high["regime"] == "explosive"


def test_regime_one_sided_grid_warns():
    with pytest.warns(RuntimeWarning):
        monte_carlo_regimes(complete_cfg(4), [-5.0, -4.0], write=False)


def test_regime_rejects_modulated():
    cfg = config_from_dict(
        {"graph": {"n": 10, "m": 2}, "sim": {"reaction": {"form": "modulated", "phi": {"name": "identity"},
                                                          "psi": {"name": "identity"}}}}
    )
    with pytest.raises(ConfigError):
        monte_carlo_regimes(cfg, [0.0], write=False)


def _sweep_cfg(grid_x, grid_y=None, **extra):
    sweep = {"param_x": {"path": "sim.reaction.C_F", "grid": grid_x}}
    if grid_y:
        sweep["param_y"] = {"path": "sim.noise.sigma", "grid": grid_y}
    raw = {
        "seed": 2,
        "graph": {"model": "erdos_renyi", "n": 6, "prob": 1.0, "normalization": "none"},
        "sim": {"p": 2.0, "eps": 0.0, "horizon": 0.5, "snapshot_stride": 10, **QUIET_SIM},
        "replicates": 2,
        "sweep": sweep,
    }
    raw.update(extra)
    return config_from_dict(raw)


def test_sweep_three_by_three(tmp_path):
    rows = parameter_sweep(_sweep_cfg([0.0, 0.5, 1.0], [0.0, 0.01, 0.02]), out_dir=tmp_path)
    cells = {(r["x"], r["y"]) for r in rows}
    assert len(cells) == 9 and len(rows) == 27
    lines = [r for r in csv.reader(open(tmp_path / "sweep.csv")) if not r[0].startswith("#")]
    assert lines[0] == ["param_x", "x", "param_y", "y", "statistic", "value"]
    assert len(lines) == 28


def test_sweep_single_cell_matches_run_experiment():
    cfg = _sweep_cfg([0.7])
    rows = {r["statistic"]: r["value"] for r in parameter_sweep(cfg, write=False)}
    direct = run_experiment(
        config_from_dict({**cfg.tree, "sweep": None, "sim": {**cfg.tree["sim"], "reaction": {"form": "linear", "C_F": 0.7}}}),
        write=False,
    )
    assert rows["mean_event_time"] == direct.mean_event_time
    assert rows["blowup_fraction"] == direct.blowup_fraction
    assert rows["final_mean_l2_norm_sq"] == direct.final_mean_l2


def test_sweep_event_time_nonincreasing_in_C_F():
    cfg = _sweep_cfg([0.0, 1.0, 2.0, 3.0, 4.0], events={"threshold": 0.5, "direction": "above"},
                     sim={"p": 2.0, "eps": 0.0, "horizon": 2.0, "snapshot_stride": 10, **QUIET_SIM})
    times = [r["value"] for r in parameter_sweep(cfg, write=False) if r["statistic"] == "mean_event_time"]
    assert np.all(np.diff(times) <= 0)
    assert times[-1] < times[0]


def test_sweep_without_section():
    with pytest.raises(ConfigError):
        parameter_sweep(tiny(), write=False)


def test_sweep_cell_validation_is_exhaustive():
    cfg = config_from_dict({"graph": {"n": 10, "m": 2}, "sweep": {"param_x": {"path": "sim.dt", "grid": [-1.0, 0.0]}}})
    with pytest.raises(ConfigError) as info:
        parameter_sweep(cfg, write=False)
    assert len(info.value.problems) >= 2


def test_topology_cycle_and_single_seed():
    spec = GraphModelSpec("watts_strogatz", n=6, k=2, beta=0.0)
    rows, ordering = topology_comparison([spec], 2.0, seeds=1, normalization="none")
    row = rows[0]
    assert row["lambda_p_mean"] == pytest.approx(4.0, abs=1e-6)
    assert row["gamma_raw_adjacency_mean"] == pytest.approx(2.0, abs=1e-8)
    assert row["lambda_p_sd"] == 0.0 and row["gamma_raw_adjacency_sd"] == 0.0
    assert ordering is None


def test_topology_seeds_are_shared_and_workers_irrelevant():
    specs = [GraphModelSpec("barabasi_albert", n=60, m=2), GraphModelSpec("erdos_renyi", n=60, prob=0.07)]
    a, _ = topology_comparison(specs, 2.0, seeds=3, workers=1)
    b, _ = topology_comparison(specs, 2.0, seeds=3, workers=2)
    assert a == b
    assert [r["seed"] for r in a[0]["per_seed"]] == [r["seed"] for r in a[1]["per_seed"]]


def test_summary_reports_baseline_hazard_flatness(tmp_path):
    run_experiment(tiny(replicates=3, sim={"horizon": 0.5}, events={"threshold": 0.02, "direction": "above"}), out_dir=tmp_path)
    d = json.loads((tmp_path / "summary.json").read_text())
    assert "baseline_hazard_cv" in d
    assert d["baseline_hazard_cv"] is None or d["baseline_hazard_cv"] >= 0
