import pytest
import yaml

from gehm.config import DEFAULTS, config_from_dict, dump_tree, get_path, load_config, set_path
from gehm.errors import ConfigError


def test_defaults_are_reference_values():
    cfg = config_from_dict({})
    sim = cfg.sim
    assert (sim.dt, sim.noise.sigma, sim.ou.kappa, sim.ou.xi, sim.p, sim.eps) == (1e-3, 0.02, 0.3, 0.1, 3.0, 1e-8)
    assert cfg.seed == 123456 and cfg.graph.seed == 123456
    assert (cfg.graph.model, cfg.graph.n, cfg.graph.m) == ("barabasi_albert", 2000, 3)
    assert cfg.normalization == "row"
    assert cfg.spectral.p == 3.0 and cfg.spectral.gamma_basis == "raw_adjacency"
    assert cfg.tree["config_version"] == 1


def test_replicate_seeds():
    cfg = config_from_dict({"seed": 10, "replicates": 3})
    assert [cfg.replicate_sim(k).seed for k in (1, 2, 3)] == [11, 12, 13]


def test_all_problems_reported():
    raw = {
        "bogus": 1,
        "graph": {"n": -3, "normalization": "diagonal"},
        "sim": {"dt": -1.0, "ou": {"kappa": 0}},
        "replicates": 0,
        "spectral": {"gamma_basis": "laplacian"},
    }
    with pytest.raises(ConfigError) as info:
        config_from_dict(raw)
    text = "\n".join(info.value.problems)
    for needle in ("bogus", "graph.n", "normalization", "sim.dt", "kappa", "replicates", "gamma_basis"):
        assert needle in text
    assert len(info.value.problems) >= 7


def test_wrong_version():
    with pytest.raises(ConfigError):
        config_from_dict({"config_version": 2})


def test_spectral_p_inherits_sim_p():
    cfg = config_from_dict({"sim": {"p": 2.5}})
    assert cfg.spectral.p == 2.5
    assert config_from_dict({"sim": {"p": 2.5}, "spectral": {"p": 2.0}}).spectral.p == 2.0


def test_gap_requires_p2():
    with pytest.raises(ConfigError):
        config_from_dict({"spectral": {"lambda_choice": "gap"}})
    assert config_from_dict({"sim": {"p": 2.0}, "spectral": {"lambda_choice": "gap"}}).spectral.lambda_choice == "gap"


def test_modulated_reaction():
    cfg = config_from_dict(
        {"sim": {"reaction": {"form": "modulated", "phi": {"name": "tanh_scaled", "param": 2.0},
                              "psi": {"name": "constant", "param": 0.1}}}}
    )
    assert cfg.sim.reaction.phi(0.0) == 0.0
    with pytest.raises(ConfigError):
        config_from_dict({"sim": {"reaction": {"form": "modulated", "phi": {"name": "nope"}}}})


def test_sweep_validation():
    ok = config_from_dict({"sweep": {"param_x": {"path": "sim.reaction.C_F", "grid": [0, 1]}}})
    assert ok.sweep_x.grid == (0, 1) and ok.sweep_y is None
    bad = [
        {"sweep": {"param_x": {"path": "seed", "grid": [1, 2]}}},
        {"sweep": {"param_x": {"path": "sim.seed", "grid": [1, 2]}}},
        {"sweep": {"param_x": {"path": "sim.nothing", "grid": [1]}}},
        {"sweep": {"param_x": {"path": "sim.dt", "grid": []}}},
        {"sweep": {"param_x": {"path": "sim.dt", "grid": [float("inf")]}}},
        {"sweep": {"param_y": {"path": "sim.dt", "grid": [1e-3]}}},
    ]
    for raw in bad:
        with pytest.raises(ConfigError):
            config_from_dict(raw)


def test_load_and_dump_roundtrip(tmp_path):
    cfg = config_from_dict({"graph": {"n": 50}, "replicates": 2})
    path = tmp_path / "c.yaml"
    path.write_text(dump_tree(cfg.tree))
    again = load_config(path)
    assert again == cfg
    assert yaml.safe_load(path.read_text())["graph"]["n"] == 50


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("sim: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_paths():
    tree = {"a": {"b": 1}}
    set_path(tree, "a.b", 2)
    assert get_path(tree, "a.b") == 2
    with pytest.raises(KeyError):
        set_path(tree, "a.c", 1)
    assert get_path(DEFAULTS, "sim.ou.kappa") == 0.3


def test_topology_specs():
    cfg = config_from_dict({"topologies": {"seeds": 2, "specs": [{"model": "erdos_renyi", "n": 30, "prob": 0.2}]}})
    assert cfg.topology_specs[0].model == "erdos_renyi"
    with pytest.raises(ConfigError):
        config_from_dict({"topologies": {"specs": [{"model": "watts_strogatz", "n": 30, "k": 3, "beta": 0.1}]}})
