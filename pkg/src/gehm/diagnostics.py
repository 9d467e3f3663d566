"""Energy functionals, regime classification and event extraction.

Edge-sum conventions used throughout:

* ``energy_p`` sums over *unordered* edges with weight ``(w_ij + w_ji) / 2``.
* gradient norms ``||grad u||_2^2`` and ``||grad u||_p^p`` sum over *directed*
  edges (each unordered pair twice) with weight ``w_ij``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ParameterError
from .operators import ReactionSpec

REGIMES = ("dissipative", "critical", "amplifying", "explosive")
EDGE_CONVENTION = (
    "energy_p: unordered edges, weight (w_ij+w_ji)/2; "
    "gradient norms: directed edges, weight w_ij"
)


def energy_p(graph, u, p):
    """``(1/p) sum_{i<j} (w_ij + w_ji)/2 |u_i - u_j|^p``."""
    u = np.asarray(u, dtype=np.float64)
    d = np.abs(u[graph.src] - u[graph.dst])
    return float(graph.weight @ d**p) / (2.0 * p)


def gradient_norm_p(graph, u, p):
    """``sum over directed edges of w_ij |u_i - u_j|^p``."""
    u = np.asarray(u, dtype=np.float64)
    d = np.abs(u[graph.src] - u[graph.dst])
    return float(graph.weight @ d**p)


def dissipation_residual(traj, graph, p, lambda_p, C_F):
    """Slack of the energy inequality at snapshot times.

    Returns ``(times, r)`` with
    ``r = dE_p/dt - (-lambda_p ||grad u||_p^p + C_F ||u||_2^2)``.  The time
    derivative is a finite difference of ``E_p`` sampled at the snapshots,
    so its accuracy improves as the snapshot stride shrinks.
    """
    if traj.snapshot_times.size < 2:
        raise InsufficientDataError("dissipation residual needs at least two snapshots")
    ts = traj.snapshot_times
    U = traj.snapshots
    E = np.array([energy_p(graph, u, p) for u in U])
    G = np.array([gradient_norm_p(graph, u, p) for u in U])
    L2 = np.einsum("ij,ij->i", U, U)
    dE = np.gradient(E, ts)
    return ts, dE - (-lambda_p * G + C_F * L2)


@dataclass
class RegimeReport:
    R: float
    regime: str
    delta_band: float
    lambda_p: float | None = None
    gamma: float | None = None
    gamma_basis: str | None = None
    C_F: float | None = None
    fitted_rate: float | None = None
    t_star: float | None = None
    note: str | None = None

    def to_dict(self):
        return {
            "R": self.R,
            "regime": self.regime,
            "delta_band": self.delta_band,
            "lambda_p": self.lambda_p,
            "gamma": self.gamma,
            "gamma_basis": self.gamma_basis,
            "C_F": self.C_F,
            "evidence": {"fitted_rate": self.fitted_rate, "t_star": self.t_star},
            "note": self.note,
        }


def classify_regime(R, delta_band=0.05, traj_evidence=None, **context):
    """Map the regime index to a regime; observed blow-up forces ``explosive``.

    ``traj_evidence`` is a :class:`~gehm.dynamics.BlowupDetection` (or any
    object with ``t_star`` and ``growth_rate``).  ``context`` fills the
    descriptive fields of the report.
    """
    if not delta_band > 0:
        raise ParameterError("delta_band must be positive")
    if not math.isfinite(R):
        raise ParameterError("regime index must be finite")
    t_star = getattr(traj_evidence, "t_star", None)
    rate = getattr(traj_evidence, "growth_rate", None)
    if t_star is not None:
        regime = "explosive"
    elif R < -delta_band:
        regime = "dissipative"
    elif R <= delta_band:
        regime = "critical"
    else:
        regime = "amplifying"
    return RegimeReport(R=R, regime=regime, delta_band=delta_band, fitted_rate=rate, t_star=t_star, **context)


def amplification_functional(graph, u, reaction, gamma, x_second_moment):
    """Single-sample ``C_F ||grad u||_2^2 + gamma E[X^2]``.

    ``reaction`` is a linear :class:`ReactionSpec` or the coefficient
    ``C_F`` itself.  Averaging over replicates estimates the expectation.
    """
    C_F = reaction.linear_coefficient() if isinstance(reaction, ReactionSpec) else float(reaction)
    u = np.asarray(u, dtype=np.float64)
    g = u[graph.src] - u[graph.dst]
    return C_F * float(graph.weight @ (g * g)) + gamma * x_second_moment


def critical_surface_gap(amplification, lambda_p):
    """Distance ``A - lambda_p`` to the critical surface."""
    return amplification - lambda_p


def ensemble_amplification(graph, us, xs, reaction, gamma):
    """Monte Carlo estimate of the amplification functional at one time."""
    xs = np.asarray(xs, dtype=np.float64)
    m2 = float(np.mean(xs * xs))
    vals = [amplification_functional(graph, u, reaction, 0.0, 0.0) for u in us]
    return float(np.mean(vals)) + gamma * m2


@dataclass
class EventTable:
    node: np.ndarray
    time: np.ndarray
    observed: np.ndarray

    def __post_init__(self):
        self.node = np.asarray(self.node, dtype=np.int64)
        self.time = np.asarray(self.time, dtype=np.float64)
        self.observed = np.asarray(self.observed, dtype=bool)
        if not (self.node.shape == self.time.shape == self.observed.shape):
            raise ParameterError("event table columns differ in length")
        if np.any(self.time < 0) or not np.all(np.isfinite(self.time)):
            raise ParameterError("event times must be finite and non-negative")
        if np.unique(self.node).size != self.node.size:
            raise ParameterError("each node may appear at most once")

    def __len__(self):
        return self.node.size

    @property
    def status(self):
        return np.where(self.observed, "event", "censored")


def extract_event_times(traj, threshold, direction="above"):
    """First snapshot time at which each node is at/over (or at/under) ``threshold``.

    Nodes that never cross are censored at the last snapshot time.
    """
    if not traj.has_snapshots:
        raise InsufficientDataError("event extraction needs snapshots")
    U = traj.snapshots
    if direction == "above":
        hit = U >= threshold
    elif direction == "below":
        hit = U <= threshold
    else:
        raise ParameterError(f"direction must be 'above' or 'below', got {direction!r}")
    crossed = hit.any(axis=0)
    first = np.argmax(hit, axis=0)
    ts = traj.snapshot_times
    time = np.where(crossed, ts[first], ts[-1])
    return EventTable(np.arange(U.shape[1]), time, crossed)
