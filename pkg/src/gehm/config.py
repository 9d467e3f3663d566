"""Experiment configuration: a versioned YAML key-value tree.

Every key has a default, so an empty file (plus ``config_version: 1``) is a
complete config.  Validation reports every problem it finds.  A single
master ``seed`` drives graph generation, spectral start vectors and, shifted
by the replicate index, the simulation noise.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .dynamics import InitSpec, OUParams, SimulationConfig
from .errors import ConfigError
from .graph import SCHEMES, GraphModelSpec
from .operators import NoiseSpec, ReactionSpec, ScalarMap
from .spectral import GAMMA_BASES, LAMBDA_CHOICES

CONFIG_VERSION = 1
SEED_PATHS = ("seed",)

DEFAULTS = {
    "config_version": CONFIG_VERSION,
    "seed": 123456,
    "graph": {
        "model": "barabasi_albert",
        "n": 2000,
        "m": 3,
        "prob": None,
        "k": None,
        "beta": None,
        "normalization": "row",
    },
    "sim": {
        "p": 3.0,
        "eps": 1e-8,
        "dt": 1e-3,
        "horizon": 10.0,
        "reaction": {"form": "linear", "C_F": 0.0, "eta": 0.0, "phi": None, "psi": None},
        "noise": {
            "form": "additive",
            "sigma": 0.02,
            "sigma0": 0.0,
            "eta_deg": 0.0,
            "alpha": 0.0,
            "beta": 0.0,
        },
        "ou": {"kappa": 0.3, "mu": 0.0, "xi": 0.1, "x0": 0.0},
        "init": {"kind": "gaussian_unit_l2", "value": 0.0, "values": None},
        "blowup_threshold": None,
        "blowup_factor": 1e6,
        "snapshot_stride": 100,
        "noise_coupling": "independent_per_node",
        "evolve_u": True,
        "force": False,
    },
    "spectral": {
        "p": None,
        "tol": 1e-10,
        "max_iter": 20000,
        "gamma_basis": "raw_adjacency",
        "lambda_choice": "dominant",
    },
    "regime": {"delta_band": 0.05},
    "events": {"threshold": 0.1, "direction": "above"},
    "replicates": 100,
    "workers": 1,
    "outputs": {"directory": "gehm-out", "snapshots": True, "csv_stride": 1},
    "sweep": None,
    "topologies": {"seeds": 20, "ws_beta": 0.1, "specs": None},
}

# mappings whose keys are free-form (not checked against DEFAULTS)
_OPEN = {("sweep",), ("sim", "reaction", "phi"), ("sim", "reaction", "psi"), ("topologies", "specs")}


def _merge(defaults, given, path, problems):
    if given is None:
        return copy.deepcopy(defaults)
    if not isinstance(given, dict):
        problems.append(f"{'.'.join(path) or '<root>'} must be a mapping")
        return copy.deepcopy(defaults)
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        sub = path + (str(key),)
        if key not in defaults:
            problems.append(f"unknown key {'.'.join(sub)}")
            continue
        if isinstance(defaults[key], dict) and sub not in _OPEN:
            out[key] = _merge(defaults[key], val, sub, problems)
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve(raw) -> tuple[dict, list]:
    """Merge ``raw`` over :data:`DEFAULTS`; returns the tree and structural problems."""
    problems = []
    raw = {} if raw is None else raw
    if isinstance(raw, dict) and raw.get("config_version", CONFIG_VERSION) != CONFIG_VERSION:
        problems.append(f"config_version must be {CONFIG_VERSION}, got {raw.get('config_version')!r}")
    tree = _merge(DEFAULTS, raw, (), problems)
    return tree, problems


def get_path(tree, path):
    node = tree
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise KeyError(path)
        node = node[part]
    return node


def set_path(tree, path, value):
    parts = path.split(".")
    node = tree
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise KeyError(path)
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise KeyError(path)
    node[parts[-1]] = value


@dataclass(frozen=True)
class SpectralSettings:
    p: float
    tol: float = 1e-10
    max_iter: int = 20000
    gamma_basis: str = "raw_adjacency"
    lambda_choice: str = "dominant"


@dataclass(frozen=True)
class SweepAxis:
    path: str
    grid: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    graph: GraphModelSpec
    normalization: str
    sim: SimulationConfig
    spectral: SpectralSettings
    delta_band: float
    event_threshold: float
    event_direction: str
    replicates: int
    workers: int
    output_dir: str
    write_snapshots: bool
    csv_stride: int
    sweep_x: SweepAxis | None = None
    sweep_y: SweepAxis | None = None
    topology_seeds: int = 20
    ws_beta: float = 0.1
    topology_specs: tuple | None = None
    tree: dict = field(default_factory=dict, compare=False, repr=False)

    def replicate_sim(self, k):
        """Simulation config of replicate ``k`` (1-based): seed ``seed + k``."""
        return replace(self.sim, seed=self.seed + k)


def _num(tree, path, problems, *, integer=False, positive=False, nonneg=False, optional=False):
    try:
        v = get_path(tree, path)
    except KeyError:
        problems.append(f"missing key {path}")
        return None
    if v is None and optional:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        problems.append(f"{path} must be a number, got {v!r}")
        return None
    if integer and int(v) != v:
        problems.append(f"{path} must be an integer, got {v!r}")
        return None
    if not math.isfinite(v):
        problems.append(f"{path} must be finite")
        return None
    if positive and v <= 0:
        problems.append(f"{path} must be > 0, got {v!r}")
    if nonneg and v < 0:
        problems.append(f"{path} must be >= 0, got {v!r}")
    return int(v) if integer else float(v)


def _choice(tree, path, options, problems):
    v = get_path(tree, path)
    if v not in options:
        problems.append(f"{path} must be one of {tuple(options)}, got {v!r}")
        return options[0]
    return v


def _scalar_map(d, where, problems):
    if d is None:
        return None
    if isinstance(d, str):
        return ScalarMap(d)
    if not isinstance(d, dict) or "name" not in d:
        problems.append(f"{where} must be a map name or {{name, param}}")
        return None
    extra = set(d) - {"name", "param"}
    if extra:
        problems.append(f"{where} has unknown keys {sorted(extra)}")
    return ScalarMap(d["name"], None if d.get("param") is None else float(d["param"]))


def _graph_spec(d, seed, where, problems):
    known = {"model", "n", "m", "prob", "k", "beta", "seed"}
    extra = set(d) - known
    if extra:
        problems.append(f"{where} has unknown keys {sorted(extra)}")
    try:
        spec = GraphModelSpec(
            model=d.get("model", "barabasi_albert"),
            n=d.get("n", 2000),
            seed=d.get("seed", seed),
            m=d.get("m"),
            prob=d.get("prob"),
            k=d.get("k"),
            beta=d.get("beta"),
        )
    except TypeError as exc:
        problems.append(f"{where}: {exc}")
        return None
    problems.extend(f"{where}: {p}" for p in spec.problems())
    return spec


def _sweep_axis(tree, key, problems):
    sweep = tree.get("sweep")
    if not sweep or sweep.get(key) is None:
        return None
    ax = sweep[key]
    where = f"sweep.{key}"
    if not isinstance(ax, dict) or "path" not in ax or "grid" not in ax:
        problems.append(f"{where} must have 'path' and 'grid'")
        return None
    path, grid = ax["path"], ax["grid"]
    if path in SEED_PATHS or path.split(".")[-1] == "seed":
        problems.append(f"{where}.path {path!r} collides with the seed; seeds vary only by replicate")
        return None
    try:
        get_path(tree, path)
    except KeyError:
        problems.append(f"{where}.path {path!r} does not resolve in the config")
        return None
    if not isinstance(grid, list) or not grid:
        problems.append(f"{where}.grid must be a non-empty list")
        return None
    for v in grid:
        if isinstance(v, (int, float)) and not isinstance(v, bool) and not math.isfinite(v):
            problems.append(f"{where}.grid contains a non-finite value")
            return None
    return SweepAxis(path, tuple(grid))


def from_tree(tree, structural=()):
    problems = list(structural)
    seed = _num(tree, "seed", problems, integer=True, nonneg=True)
    seed = 0 if seed is None else seed

    g = tree["graph"]
    graph = _graph_spec({k: v for k, v in g.items() if k != "normalization"}, seed, "graph", problems)
    normalization = _choice(tree, "graph.normalization", SCHEMES, problems)

    s = tree["sim"]
    r = s["reaction"]
    reaction_form = r.get("form")
    if reaction_form == "modulated":
        reaction = ReactionSpec(
            "modulated",
            phi=_scalar_map(r.get("phi"), "sim.reaction.phi", problems),
            psi=_scalar_map(r.get("psi"), "sim.reaction.psi", problems),
        )
    else:
        reaction = ReactionSpec(
            reaction_form,
            C_F=_num(tree, "sim.reaction.C_F", problems) or 0.0,
            eta=_num(tree, "sim.reaction.eta", problems) or 0.0,
        )
    nz = s["noise"]
    noise = NoiseSpec(
        nz.get("form"),
        **{k: (_num(tree, f"sim.noise.{k}", problems) or 0.0) for k in ("sigma", "sigma0", "eta_deg", "alpha", "beta")},
    )
    ou = OUParams(**{k: (_num(tree, f"sim.ou.{k}", problems) or 0.0) for k in ("kappa", "mu", "xi", "x0")})
    init_values = s["init"].get("values")
    init = InitSpec(
        kind=s["init"].get("kind"),
        value=_num(tree, "sim.init.value", problems) or 0.0,
        values=tuple(float(v) for v in init_values) if init_values else None,
    )
    for flag in ("evolve_u", "force"):
        if not isinstance(s[flag], bool):
            problems.append(f"sim.{flag} must be true or false")
    sim = SimulationConfig(
        p=_num(tree, "sim.p", problems) or 0.0,
        eps=_num(tree, "sim.eps", problems) or 0.0,
        dt=_num(tree, "sim.dt", problems) or 0.0,
        horizon=_num(tree, "sim.horizon", problems) or 0.0,
        reaction=reaction,
        noise=noise,
        ou=ou,
        seed=seed,
        init=init,
        blowup_threshold=_num(tree, "sim.blowup_threshold", problems, optional=True),
        blowup_factor=_num(tree, "sim.blowup_factor", problems) or 0.0,
        snapshot_stride=_num(tree, "sim.snapshot_stride", problems, integer=True) or 0,
        noise_coupling=s["noise_coupling"],
        evolve_u=bool(s["evolve_u"]),
        force=bool(s["force"]),
    )
    problems.extend(sim.problems("sim"))

    sp_p = _num(tree, "spectral.p", problems, optional=True)
    spectral = SpectralSettings(
        p=sim.p if sp_p is None else sp_p,
        tol=_num(tree, "spectral.tol", problems, positive=True) or 1e-10,
        max_iter=_num(tree, "spectral.max_iter", problems, integer=True, positive=True) or 1,
        gamma_basis=_choice(tree, "spectral.gamma_basis", GAMMA_BASES, problems),
        lambda_choice=_choice(tree, "spectral.lambda_choice", LAMBDA_CHOICES, problems),
    )
    if sp_p is not None and spectral.p <= 1:
        problems.append(f"spectral.p must be > 1, got {sp_p}")
    if spectral.lambda_choice == "gap" and spectral.p != 2:
        problems.append("spectral.lambda_choice 'gap' requires spectral.p = 2")

    delta = _num(tree, "regime.delta_band", problems, positive=True) or 0.05
    ev_thr = _num(tree, "events.threshold", problems) or 0.0
    ev_dir = _choice(tree, "events.direction", ("above", "below"), problems)
    replicates = _num(tree, "replicates", problems, integer=True) or 0
    if replicates < 1:
        problems.append(f"replicates must be >= 1, got {tree['replicates']!r}")
    workers = _num(tree, "workers", problems, integer=True) or 0
    if workers < 1:
        problems.append(f"workers must be >= 1, got {tree['workers']!r}")
    out = tree["outputs"]
    if not isinstance(out["directory"], str) or not out["directory"]:
        problems.append("outputs.directory must be a non-empty string")
    if not isinstance(out["snapshots"], bool):
        problems.append("outputs.snapshots must be true or false")
    csv_stride = _num(tree, "outputs.csv_stride", problems, integer=True, positive=True) or 1

    sweep_x = sweep_y = None
    if tree.get("sweep") is not None:
        if not isinstance(tree["sweep"], dict):
            problems.append("sweep must be a mapping with param_x (and optionally param_y)")
        else:
            extra = set(tree["sweep"]) - {"param_x", "param_y"}
            if extra:
                problems.append(f"sweep has unknown keys {sorted(extra)}")
            sweep_x = _sweep_axis(tree, "param_x", problems)
            sweep_y = _sweep_axis(tree, "param_y", problems)
            if sweep_x is None and "param_x" not in tree["sweep"]:
                problems.append("sweep.param_x is required")

    topo = tree["topologies"]
    tseeds = _num(tree, "topologies.seeds", problems, integer=True, positive=True) or 1
    ws_beta = _num(tree, "topologies.ws_beta", problems) or 0.0
    specs = None
    if topo.get("specs") is not None:
        if not isinstance(topo["specs"], list) or not topo["specs"]:
            problems.append("topologies.specs must be a non-empty list")
        else:
            specs = tuple(
                _graph_spec(d, seed, f"topologies.specs[{i}]", problems)
                for i, d in enumerate(topo["specs"])
            )

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        seed=seed,
        graph=graph,
        normalization=normalization,
        sim=sim,
        spectral=spectral,
        delta_band=delta,
        event_threshold=ev_thr,
        event_direction=ev_dir,
        replicates=replicates,
        workers=workers,
        output_dir=out["directory"],
        write_snapshots=out["snapshots"],
        csv_stride=csv_stride,
        sweep_x=sweep_x,
        sweep_y=sweep_y,
        topology_seeds=tseeds,
        ws_beta=ws_beta,
        topology_specs=specs,
        tree=tree,
    )


def config_from_dict(raw) -> ExperimentConfig:
    tree, structural = resolve(raw)
    return from_tree(tree, structural)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(raw)


def dump_tree(tree) -> str:
    return yaml.safe_dump(tree, sort_keys=False, default_flow_style=False)
