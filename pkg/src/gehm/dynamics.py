"""Explicit Euler / Euler-Maruyama integration of the node and drift states.

One step advances

    u' = u + dt * Delta_p u + dt * F(u, X) + sigma(u, X) * sqrt(dt) * eps
    X' = X + kappa (mu - X) dt + xi * sqrt(dt) * eps'

with ``eps`` standard normal per node (or one shared draw) and ``eps'`` an
independent standard normal.  Node noise and OU noise come from separate
labeled substreams of the run seed, buffered in blocks; buffering does not
change the drawn sequence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .diagnostics import energy_p
from .errors import ConfigError, DomainError, InsufficientDataError, ParameterError
from .operators import NoiseSpec, ReactionSpec, noise_coefficients, p_laplacian
from .rng import substream

COUPLINGS = ("independent_per_node", "shared_scalar")
INIT_KINDS = ("gaussian_unit_l2", "constant", "custom")
CFL_WARN = 0.5
CFL_REFUSE = 1.0


@dataclass(frozen=True)
class OUParams:
    kappa: float = 0.3
    mu: float = 0.0
    xi: float = 0.1
    x0: float = 0.0


@dataclass(frozen=True)
class InitSpec:
    kind: str = "gaussian_unit_l2"
    value: float = 0.0
    values: tuple | None = None


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one run.  Defaults follow the reference setup."""

    p: float = 3.0
    eps: float = 1e-8
    dt: float = 1e-3
    horizon: float = 10.0
    reaction: ReactionSpec = field(default_factory=ReactionSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    ou: OUParams = field(default_factory=OUParams)
    seed: int = 123456
    init: InitSpec = field(default_factory=InitSpec)
    blowup_threshold: float | None = None
    blowup_factor: float = 1e6
    snapshot_stride: int = 100
    noise_coupling: str = "independent_per_node"
    evolve_u: bool = True
    force: bool = False

    @property
    def n_steps(self):
        return max(1, int(math.ceil(self.horizon / self.dt * (1.0 - 1e-12))))

    def problems(self, where="sim"):
        out = []

        def finite(name, v):
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                out.append(f"{where}.{name} must be a finite number, got {v!r}")
                return False
            return True

        if finite("p", self.p) and self.p <= 1:
            out.append(f"{where}.p must be > 1, got {self.p}")
        if finite("eps", self.eps) and self.eps < 0:
            out.append(f"{where}.eps must be >= 0, got {self.eps}")
        dt_ok = finite("dt", self.dt) and self.dt > 0
        if not dt_ok:
            out.append(f"{where}.dt must be > 0, got {self.dt!r}")
        if finite("horizon", self.horizon) and dt_ok and self.horizon < self.dt * (1 - 1e-12):
            out.append(f"{where}.horizon must be >= dt, got {self.horizon}")
        out += self.reaction.problems(f"{where}.reaction")
        out += self.noise.problems(f"{where}.noise")
        ou = self.ou
        if finite("ou.kappa", ou.kappa) and ou.kappa <= 0:
            out.append(f"{where}.ou.kappa must be > 0, got {ou.kappa}")
        finite("ou.mu", ou.mu)
        finite("ou.x0", ou.x0)
        if finite("ou.xi", ou.xi) and ou.xi < 0:
            out.append(f"{where}.ou.xi must be >= 0, got {ou.xi}")
        if not isinstance(self.seed, int) or self.seed < 0:
            out.append(f"{where}.seed must be a non-negative integer, got {self.seed!r}")
        if self.init.kind not in INIT_KINDS:
            out.append(f"{where}.init.kind must be one of {INIT_KINDS}, got {self.init.kind!r}")
        elif self.init.kind == "custom" and not self.init.values:
            out.append(f"{where}.init.values is required for a custom initial condition")
        if self.blowup_threshold is not None and not (
            finite("blowup_threshold", self.blowup_threshold) and self.blowup_threshold > 0
        ):
            out.append(f"{where}.blowup_threshold must be > 0")
        if finite("blowup_factor", self.blowup_factor) and self.blowup_factor <= 1:
            out.append(f"{where}.blowup_factor must be > 1")
        if not isinstance(self.snapshot_stride, int) or self.snapshot_stride < 0:
            out.append(f"{where}.snapshot_stride must be a non-negative integer")
        if self.noise_coupling not in COUPLINGS:
            out.append(f"{where}.noise_coupling must be one of {COUPLINGS}")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise ConfigError(probs)
        return self


@dataclass
class SystemState:
    u: np.ndarray
    x: float
    t: float = 0.0


@dataclass
class Trajectory:
    """Per-step diagnostics of one run plus optional strided snapshots."""

    times: np.ndarray
    l2_norm_sq: np.ndarray
    energy_p: np.ndarray
    x_path: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    status: str = "completed"
    t_event: float | None = None
    blowup_threshold: float | None = None
    p: float | None = None

    @property
    def t_star(self):
        return self.t_event if self.status == "blowup" else None

    @property
    def has_snapshots(self):
        return self.snapshot_times.size > 0

    def __len__(self):
        return self.times.size


class NoiseStreams:
    """Buffered standard normals for node noise and OU noise.

    ``take_node(k)`` returns ``(k, n)`` draws for independent coupling or
    ``(k, 1)`` for the shared scalar; ``take_ou(k)`` returns ``(k,)``.
    """

    def __init__(self, seed, n, coupling="independent_per_node", block=256):
        if coupling not in COUPLINGS:
            raise ParameterError(f"noise coupling must be one of {COUPLINGS}")
        self._node_rng = substream(seed, "node-noise")
        self._ou_rng = substream(seed, "ou-noise")
        self._width = n if coupling == "independent_per_node" else 1
        self._block = block
        self._node_buf = np.empty((0, self._width))
        self._ou_buf = np.empty(0)

    def take_node(self, k):
        while self._node_buf.shape[0] < k:
            more = self._node_rng.standard_normal((self._block, self._width))
            self._node_buf = np.concatenate([self._node_buf, more])
        out, self._node_buf = self._node_buf[:k], self._node_buf[k:]
        return out

    def take_ou(self, k):
        while self._ou_buf.size < k:
            self._ou_buf = np.concatenate([self._ou_buf, self._ou_rng.standard_normal(self._block)])
        out, self._ou_buf = self._ou_buf[:k], self._ou_buf[k:]
        return out


def _ou_coefficients(cfg):
    ou = cfg.ou
    a = 1.0 - ou.kappa * cfg.dt
    b = ou.kappa * ou.mu * cfg.dt
    c = ou.xi * math.sqrt(cfg.dt)
    return a, b, c


def _advance_u(graph, u, x, cfg, eps_u, sqdt):
    drift = p_laplacian(graph, u, cfg.p, cfg.eps)
    a, b = cfg.reaction.coefficients(x)
    sigma = noise_coefficients(graph, u, x, cfg.noise)
    return u + cfg.dt * drift + cfg.dt * (a * u + b) + sigma * (sqdt * eps_u)


def step(state: SystemState, graph, cfg: SimulationConfig, rng: NoiseStreams) -> SystemState:
    """Advance one explicit step.  Non-finite output is returned as-is."""
    sqdt = math.sqrt(cfg.dt)
    u = state.u
    if cfg.evolve_u:
        u = _advance_u(graph, state.u, state.x, cfg, rng.take_node(1)[0], sqdt)
    a, b, c = _ou_coefficients(cfg)
    x = a * state.x + (b + c * rng.take_ou(1)[0])
    return SystemState(u, float(x), state.t + cfg.dt)


def initial_state(graph, cfg: SimulationConfig) -> SystemState:
    init = cfg.init
    if init.kind == "gaussian_unit_l2":
        z = substream(cfg.seed, "node-init").standard_normal(graph.n)
        nrm = np.linalg.norm(z)
        u = z / nrm if nrm > 0 else z
    elif init.kind == "constant":
        u = np.full(graph.n, float(init.value))
    elif init.kind == "custom":
        u = np.asarray(init.values, dtype=np.float64)
        if u.shape != (graph.n,):
            raise ConfigError(f"init.values has length {u.size}, graph has {graph.n} nodes")
    else:
        raise ConfigError(f"unknown init kind {init.kind!r}")
    return SystemState(u.copy(), float(cfg.ou.x0), 0.0)


def cfl_number(graph, u, cfg):
    """``dt * max_i sum_j w_ij (G + eps)^(p-2)`` with ``G`` the largest edge difference."""
    if graph.num_directed_edges == 0:
        return 0.0
    rowsum = np.bincount(graph.src, weights=graph.weight, minlength=graph.n)
    gmax = float(np.max(np.abs(u[graph.src] - u[graph.dst])))
    base = gmax + cfg.eps
    if base == 0.0:
        factor = 1.0 if cfg.p == 2 else (0.0 if cfg.p > 2 else math.inf)
    else:
        factor = base ** (cfg.p - 2.0)
    return cfg.dt * float(rowsum.max()) * factor


def simulate(graph, cfg: SimulationConfig, block=256) -> Trajectory:
    """Integrate until the horizon, a blow-up threshold crossing, or non-finite values.

    Diagnostics (``||u||^2``, ``E_p(u)``, ``X``) are recorded every step;
    full snapshots every ``snapshot_stride`` steps and at the last step
    (``snapshot_stride = 0`` disables them).
    """
    cfg.validate()
    state = initial_state(graph, cfg)
    u, x = state.u, state.x
    u0_norm = float(np.linalg.norm(u))
    if cfg.blowup_threshold is not None:
        threshold = float(cfg.blowup_threshold)
    else:
        threshold = cfg.blowup_factor * (u0_norm if u0_norm > 0 else 1.0)
    if not threshold > u0_norm:
        raise ConfigError(
            f"blowup_threshold {threshold:g} must exceed the initial norm {u0_norm:g}"
        )
    if cfg.evolve_u:
        cfl = cfl_number(graph, u, cfg)
        if cfl > CFL_REFUSE and not cfg.force:
            raise ConfigError(
                f"explicit step too large: CFL estimate {cfl:.3g} > {CFL_REFUSE} (use force to override)"
            )
        if cfl > CFL_WARN:
            warnings.warn(f"CFL estimate {cfl:.3g} exceeds {CFL_WARN}", RuntimeWarning, stacklevel=2)

    n_steps = cfg.n_steps
    dt = cfg.dt
    sqdt = math.sqrt(dt)
    stride = cfg.snapshot_stride
    l2 = np.empty(n_steps + 1)
    en = np.empty(n_steps + 1)
    xs = np.empty(n_steps + 1)
    l2[0] = float(u @ u)
    en[0] = energy_p(graph, u, cfg.p)
    xs[0] = x
    snap_idx = [0] if stride else []
    snaps = [u.copy()] if stride else []

    streams = NoiseStreams(cfg.seed, graph.n, cfg.noise_coupling, block=block)
    a, b, c = _ou_coefficients(cfg)
    status, t_event = "completed", None
    last = n_steps
    k = 0
    while k < n_steps and status == "completed":
        blk = min(block, n_steps - k)
        eps_x = streams.take_ou(blk)
        # X is autonomous; the first-order recursion x' = a x + (b + c eps) in one pass
        xblock = lfilter([1.0], [1.0, -a], b + c * eps_x, zi=[a * x])[0]
        if cfg.evolve_u:
            eps_u = streams.take_node(blk)
            for j in range(blk):
                u = _advance_u(graph, u, x, cfg, eps_u[j], sqdt)
                x = float(xblock[j])
                kk = k + j + 1
                nrm2 = float(u @ u)
                l2[kk] = nrm2
                xs[kk] = x
                if not math.isfinite(nrm2):
                    en[kk] = math.nan
                    status, t_event, last = "nonfinite", kk * dt, kk
                    break
                en[kk] = energy_p(graph, u, cfg.p)
                if math.sqrt(nrm2) >= threshold:
                    status, t_event, last = "blowup", kk * dt, kk
                    break
                if stride and (kk % stride == 0 or kk == n_steps):
                    snap_idx.append(kk)
                    snaps.append(u.copy())
        else:
            xs[k + 1 : k + blk + 1] = xblock
            l2[k + 1 : k + blk + 1] = l2[0]
            en[k + 1 : k + blk + 1] = en[0]
            x = float(xblock[-1])
            if stride:
                for kk in range(k + 1, k + blk + 1):
                    if kk % stride == 0 or kk == n_steps:
                        snap_idx.append(kk)
                        snaps.append(u.copy())
        k += blk

    if status != "completed" and stride and snap_idx[-1] != last and np.all(np.isfinite(u)):
        snap_idx.append(last)
        snaps.append(u.copy())
    times = np.arange(last + 1) * dt
    return Trajectory(
        times=times,
        l2_norm_sq=l2[: last + 1],
        energy_p=en[: last + 1],
        x_path=xs[: last + 1],
        snapshot_times=np.asarray(snap_idx, dtype=np.float64) * dt,
        snapshots=np.array(snaps) if snaps else np.empty((0, graph.n)),
        status=status,
        t_event=t_event,
        blowup_threshold=threshold,
        p=cfg.p,
    )


def ou_stationary_variance(kappa, xi):
    """Long-run variance ``xi^2 / (2 kappa)`` of the OU drift state."""
    if not kappa > 0:
        raise ParameterError(f"kappa must be > 0, got {kappa}")
    return xi * xi / (2.0 * kappa)


def predicted_blowup_time(E0, alpha_blow, p):
    """Blow-up time of ``dE/dt = alpha E^(p/2)`` started at ``E0``."""
    if not p > 2:
        raise DomainError("no finite-time blow-up is predicted for p <= 2")
    if not (alpha_blow > 0 and E0 > 0):
        raise DomainError("E0 and alpha must be positive")
    return E0 ** (1.0 - p / 2.0) / (alpha_blow * (p / 2.0 - 1.0))


def simulate_energy_surrogate(E0, alpha_blow, p, dt, threshold, horizon=None):
    """Explicit Euler on the scalar energy law ``dE/dt = alpha E^(p/2)``.

    The result is a :class:`Trajectory` whose ``l2_norm_sq`` is ``E``; the
    run stops when ``sqrt(E)`` reaches ``threshold``.
    """
    if horizon is None:
        horizon = 2.0 * predicted_blowup_time(E0, alpha_blow, p) if p > 2 else 100.0
    n_steps = int(math.ceil(horizon / dt))
    E = float(E0)
    es = [E]
    status, t_event = "completed", None
    for k in range(1, n_steps + 1):
        E = E + dt * alpha_blow * E ** (p / 2.0)
        es.append(E)
        if not math.isfinite(E):
            status, t_event = "nonfinite", k * dt
            break
        if math.sqrt(E) >= threshold:
            status, t_event = "blowup", k * dt
            break
    es = np.asarray(es)
    return Trajectory(
        times=np.arange(es.size) * dt,
        l2_norm_sq=es,
        energy_p=np.full(es.size, np.nan),
        x_path=np.zeros(es.size),
        snapshot_times=np.empty(0),
        snapshots=np.empty((0, 1)),
        status=status,
        t_event=t_event,
        blowup_threshold=threshold,
        p=p,
    )


@dataclass
class BlowupDetection:
    t_star: float | None
    growth_rate: float

    @property
    def detected(self):
        return self.t_star is not None


def _fit_rate(t, l2):
    y = np.log(np.maximum(l2, 1e-300))
    if t.size < 2 or np.ptp(t) == 0:
        return 0.0
    return float(np.polyfit(t, y, 1)[0])


def detect_blowup(traj: Trajectory, min_samples=10) -> BlowupDetection:
    """Threshold-crossing time plus fitted exponential rate of ``||u||^2``.

    For blow-up runs the rate is fitted over the final decade of
    ``||u||^2`` (at least the last three samples); otherwise over the
    second half of the record.
    """
    n = len(traj)
    if n < min_samples:
        raise InsufficientDataError(f"trajectory has {n} samples, need {min_samples}")
    t, l2 = traj.times, traj.l2_norm_sq
    finite = np.isfinite(l2)
    t, l2 = t[finite], l2[finite]
    if traj.status == "blowup":
        top = math.log10(max(l2[-1], 1e-300))
        sel = np.flatnonzero(np.log10(np.maximum(l2, 1e-300)) >= top - 1.0)
        start = min(int(sel[0]), max(0, l2.size - 3))
        return BlowupDetection(traj.t_event, _fit_rate(t[start:], l2[start:]))
    half = l2.size // 2
    return BlowupDetection(None, _fit_rate(t[half:], l2[half:]))



def fit_blowup_alpha(traj: Trajectory, p=None, decades=1.0):
    """Least-squares ``alpha`` in ``dE/dt = alpha E^(p/2)`` near divergence.

    ``E`` is the recorded ``l2_norm_sq``; forward differences over the
    samples whose ``E`` lies within ``decades`` of the final value are
    regressed through the origin on ``E^(p/2)``.
    """
    p = traj.p if p is None else p
    if p is None:
        raise ParameterError("p is required when the trajectory does not record it")
    t, E = traj.times, traj.l2_norm_sq
    ok = np.isfinite(E) & (E > 0)
    t, E = t[ok], E[ok]
    if E.size < 4:
        raise InsufficientDataError(f"need at least 4 positive finite samples, got {E.size}")
    rate = np.diff(E) / np.diff(t)
    drive = E[:-1] ** (p / 2.0)
    sel = np.log10(E[:-1]) >= math.log10(E[-1]) - decades
    if np.count_nonzero(sel) < 3:
        sel[-3:] = True
    return float(rate[sel] @ drive[sel] / (drive[sel] @ drive[sel]))
