"""Discrete differential operators on a :class:`~gehm.graph.WeightedGraph`.

Edge fields are arrays aligned with ``graph.src`` / ``graph.dst``.  The
p-Laplacian returned by :func:`p_laplacian` is the *diffusive* one,

    (Delta_p u)_i = sum_j w_ij (|u_j - u_i| + eps)^(p-2) (u_j - u_i),

so that ``u + dt * Delta_p u`` smooths.  Its negation, the accretive
operator, is :func:`accretive_operator`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError, ParameterError, UnsupportedFormError


def _node_vector(graph, u, name="u"):
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (graph.n,):
        raise InputError(f"{name} has shape {u.shape}, expected ({graph.n},)")
    return u


def _edge_field(graph, g):
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (graph.num_directed_edges,):
        raise InputError(
            f"edge field has shape {g.shape}, expected ({graph.num_directed_edges},)"
        )
    return g


def discrete_gradient(graph, u):
    """``(grad u)_ij = u_i - u_j`` on every directed edge."""
    u = _node_vector(graph, u)
    return u[graph.src] - u[graph.dst]


def divergence(graph, g):
    """``(div g)_i = sum_j w_ij g_ij``."""
    g = _edge_field(graph, g)
    return np.bincount(graph.src, weights=graph.weight * g, minlength=graph.n)


def _edge_flux(graph, u, p, eps):
    d = u[graph.dst] - u[graph.src]
    if p == 2.0:
        return graph.weight * d
    mag = np.abs(d)
    if eps == 0.0 and p < 2.0:
        # zero differences contribute zero; avoid 0**negative
        factor = np.zeros_like(mag)
        nz = mag > 0
        factor[nz] = mag[nz] ** (p - 2.0)
    else:
        factor = (mag + eps) ** (p - 2.0)
    return graph.weight * factor * d


def p_laplacian(graph, u, p, eps=0.0):
    """Diffusive graph p-Laplacian with magnitude regularization ``eps``.

    >>> from gehm.graph import WeightedGraph
    >>> g = WeightedGraph.from_edges(2, [(0, 1)])
    >>> p_laplacian(g, [1.0, 0.0], p=3).tolist()
    [-1.0, 1.0]
    """
    p = float(p)
    if not p >= 1.0:
        raise ParameterError(f"p must be >= 1, got {p}")
    if not eps >= 0.0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    u = _node_vector(graph, u)
    if not np.all(np.isfinite(u)):
        raise InputError("u contains non-finite entries")
    return np.bincount(graph.src, weights=_edge_flux(graph, u, p, eps), minlength=graph.n)


def accretive_operator(graph, u, p, eps=0.0):
    """``L_p u = -Delta_p u``; monotone on symmetric weights."""
    return -p_laplacian(graph, u, p, eps)


# ---------------------------------------------------------------------------
# reaction terms

SCALAR_MAPS = {
    "identity": (0, lambda x: x),
    "constant": (1, lambda x, c: c),
    "exp_scaled": (1, lambda x, a: math.exp(a * x)),
    "tanh_scaled": (1, lambda x, a: math.tanh(a * x)),
}


@dataclass(frozen=True)
class ScalarMap:
    """Named scalar function ``x -> f(x; param)`` drawn from :data:`SCALAR_MAPS`."""

    name: str
    param: float | None = None

    def problems(self, where):
        if self.name not in SCALAR_MAPS:
            return [f"{where}: unknown scalar map {self.name!r}"]
        nargs = SCALAR_MAPS[self.name][0]
        if nargs and (self.param is None or not math.isfinite(self.param)):
            return [f"{where}: map {self.name!r} needs a finite parameter"]
        return []

    def __call__(self, x):
        try:
            nargs, fn = SCALAR_MAPS[self.name]
        except KeyError:
            raise ConfigError(f"unknown scalar map {self.name!r}") from None
        return float(fn(x, self.param) if nargs else fn(x))

    def to_dict(self):
        return {"name": self.name} if self.param is None else {"name": self.name, "param": self.param}


@dataclass(frozen=True)
class ReactionSpec:
    """Reaction ``F(u, x)``.

    ``linear``: ``C_F * u_i + eta * x``.  ``modulated``: ``phi(x) * u_i + psi(x)``.
    """

    form: str = "linear"
    C_F: float = 0.0
    eta: float = 0.0
    phi: ScalarMap | None = None
    psi: ScalarMap | None = None

    def problems(self, where="reaction"):
        if self.form == "linear":
            bad = [k for k in ("C_F", "eta") if not math.isfinite(getattr(self, k))]
            return [f"{where}.{k} must be finite" for k in bad]
        if self.form == "modulated":
            out = []
            for k in ("phi", "psi"):
                m = getattr(self, k)
                if m is None:
                    out.append(f"{where}.{k} is required for the modulated form")
                else:
                    out += m.problems(f"{where}.{k}")
            return out
        return [f"{where}.form must be 'linear' or 'modulated', got {self.form!r}"]

    def coefficients(self, x):
        """``(a, b)`` with ``F(u, x) = a * u + b``."""
        if self.form == "linear":
            return self.C_F, self.eta * x
        if self.form == "modulated":
            if self.phi is None or self.psi is None:
                raise ConfigError("modulated reaction needs both phi and psi")
            return self.phi(x), self.psi(x)
        raise ConfigError(f"unknown reaction form {self.form!r}")

    def linear_coefficient(self):
        """``C_F`` of the linear form; the modulated form has none."""
        if self.form != "linear":
            raise UnsupportedFormError("only the linear reaction form has a constant C_F")
        return self.C_F

    def to_dict(self):
        if self.form == "linear":
            return {"form": "linear", "C_F": self.C_F, "eta": self.eta}
        return {"form": "modulated", "phi": self.phi.to_dict(), "psi": self.psi.to_dict()}


def reaction_term(u, x, spec: ReactionSpec):
    u = np.asarray(u, dtype=np.float64)
    if not math.isfinite(x):
        raise InputError("x must be finite")
    a, b = spec.coefficients(x)
    return a * u + b


# ---------------------------------------------------------------------------
# noise coefficients


@dataclass(frozen=True)
class NoiseSpec:
    """Diffusion coefficient of the node noise.

    ``additive``: constant ``sigma``.  ``multiplicative``:
    ``sigma0 (1 + deg_i^eta_deg)(1 + |u_i|^alpha)(1 + |x|^beta)``.
    """

    form: str = "additive"
    sigma: float = 0.02
    sigma0: float = 0.0
    eta_deg: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    def problems(self, where="noise"):
        if self.form == "additive":
            if not (math.isfinite(self.sigma) and self.sigma >= 0):
                return [f"{where}.sigma must be finite and >= 0, got {self.sigma!r}"]
            return []
        if self.form == "multiplicative":
            out = []
            if not (math.isfinite(self.sigma0) and self.sigma0 >= 0):
                out.append(f"{where}.sigma0 must be finite and >= 0, got {self.sigma0!r}")
            for k in ("eta_deg", "alpha", "beta"):
                if not math.isfinite(getattr(self, k)):
                    out.append(f"{where}.{k} must be finite")
            return out
        return [f"{where}.form must be 'additive' or 'multiplicative', got {self.form!r}"]

    @property
    def is_zero(self):
        return (self.sigma if self.form == "additive" else self.sigma0) == 0.0

    def to_dict(self):
        if self.form == "additive":
            return {"form": "additive", "sigma": self.sigma}
        return {
            "form": "multiplicative",
            "sigma0": self.sigma0,
            "eta_deg": self.eta_deg,
            "alpha": self.alpha,
            "beta": self.beta,
        }


def noise_coefficients(graph, u, x, spec: NoiseSpec):
    """Per-node noise amplitude ``sigma_i(u, x)``."""
    u = _node_vector(graph, u)
    if spec.form == "additive":
        if spec.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        return np.full(graph.n, float(spec.sigma))
    if spec.form == "multiplicative":
        if spec.sigma0 < 0:
            raise ParameterError("sigma0 must be >= 0")
        deg = graph.degree_cache.astype(np.float64)
        return (
            spec.sigma0
            * (1.0 + deg**spec.eta_deg)
            * (1.0 + np.abs(u) ** spec.alpha)
            * (1.0 + abs(x) ** spec.beta)
        )
    raise ConfigError(f"unknown noise form {spec.form!r}")
