"""Nonlinear eigenvalue, spectral radius and Rayleigh-type quotients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .operators import accretive_operator, p_laplacian
from .rng import substream

GAMMA_BASES = ("raw_adjacency", "normalized_W")
LAMBDA_CHOICES = ("dominant", "gap")


def _phi(x, q):
    """Odd power ``sign(x) |x|^(q-1)``; safe at zero for every ``q > 1``."""
    return np.sign(x) * np.abs(x) ** (q - 1.0)


def _pnorm(v, p):
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


@dataclass
class EigenpairResult:
    lambda_p: float
    eigenvector: np.ndarray
    iterations: int
    residual: float
    converged: bool
    restarts: int = 0
    p: float = 2.0


def nonlinear_eigenpair(
    graph,
    p,
    tol=1e-10,
    max_iter=20000,
    seed=123456,
    eps=0.0,
    residual_tol=1e-6,
    callback=None,
):
    """Dominant eigenpair of ``L_p v = lambda |v|^(p-2) v`` by dual-exponent iteration.

    Each sweep maps ``v`` to ``phi_{p'}(L_p v) / ||L_p v||_{p'}`` and rescales
    to unit p-norm.  The eigenvalue is read off as ``<L_p v, v>`` at the unit
    p-norm iterate.  Convergence needs three consecutive sweeps with relative
    eigenvalue change below ``tol`` and a residual
    ``||L_p v - lambda phi_p(v)||_2`` at most ``residual_tol * max(1, lambda)``.

    Non-convergence is not an error: the result carries ``converged=False``
    together with the last iterate.

    ``callback(k, v)`` is called with each normalized iterate.
    """
    p = float(p)
    if not p > 1.0:
        raise ParameterError(f"p must be > 1 for the dual exponent to be finite, got {p}")
    if tol <= 0 or max_iter < 1:
        raise ParameterError("tol must be positive and max_iter >= 1")
    q = p / (p - 1.0)
    rng = substream(seed, "spectral-init")
    n = graph.n

    def fresh():
        v = rng.uniform(0.0, 1.0, size=n)
        return v / _pnorm(v, p)

    v = fresh()
    restarts = 0
    lam_prev = None
    streak = 0
    lam, res = 0.0, np.inf
    k = 0
    for k in range(1, max_iter + 1):
        y = accretive_operator(graph, v, p, eps)
        lam = float(y @ v)
        res = float(np.linalg.norm(y - lam * _phi(v, p)))
        if lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam):
            streak += 1
        else:
            streak = 0
        if streak >= 3 and res <= residual_tol * max(1.0, abs(lam)):
            return EigenpairResult(lam, v, k, res, True, restarts, p)
        lam_prev = lam

        ynorm = _pnorm(y, q)
        if ynorm == 0.0:
            if restarts >= 3:
                break
            restarts += 1
            v = fresh()
            lam_prev, streak = None, 0
            continue
        v = _phi(y, q) / ynorm
        v = v / _pnorm(v, p)
        if callback is not None:
            callback(k, v)
    return EigenpairResult(lam, v, k, res, False, restarts, p)


@dataclass
class RadiusEstimate:
    value: float
    iterations: int
    converged: bool
    basis: str = "raw_adjacency"

    def __float__(self):
        return float(self.value)


def _gamma_matrix(graph, basis):
    if basis == "raw_adjacency":
        return graph.adjacency_matrix()
    if basis == "normalized_W":
        return graph.weight_matrix()
    raise ParameterError(f"gamma basis must be one of {GAMMA_BASES}, got {basis!r}")


def spectral_radius(graph, basis="raw_adjacency", tol=1e-12, max_iter=100000, seed=123456):
    """Perron root of the adjacency or weight matrix by shifted power iteration.

    The matrix is shifted by its mean row sum so that bipartite graphs (whose
    spectrum contains ``-rho``) still converge; the shift is subtracted from
    the Rayleigh quotient estimate.
    """
    M = _gamma_matrix(graph, basis)
    if graph.n == 0:
        raise ParameterError("graph is empty")
    shift = float(M.sum()) / graph.n
    if shift == 0.0:
        return RadiusEstimate(0.0, 0, True, basis)
    rng = substream(seed, "spectral-init")
    v = rng.uniform(0.5, 1.5, size=graph.n)
    v /= np.linalg.norm(v)
    est_prev = None
    streak = 0
    est = 0.0
    for k in range(1, max_iter + 1):
        w = M @ v + shift * v
        est = float(v @ w) - shift
        if est_prev is not None and abs(est - est_prev) <= tol * max(abs(est), 1e-300):
            streak += 1
            if streak >= 3:
                return RadiusEstimate(est, k, True, basis)
        else:
            streak = 0
        est_prev = est
        v = w / np.linalg.norm(w)
    return RadiusEstimate(est, max_iter, False, basis)


def laplacian_gap(graph):
    """Smallest nonzero eigenvalue of the (p = 2) weighted Laplacian, dense solve.

    For non-symmetric weights the spectrum is taken from the general
    eigensolver; row-normalized weights have a real spectrum.
    """
    L = graph.laplacian_dense()
    if graph.is_value_symmetric():
        vals = np.linalg.eigvalsh(L)
    else:
        vals = np.sort(np.linalg.eigvals(L).real)
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    nz = vals[vals > 1e-9 * scale]
    return float(nz[0]) if nz.size else 0.0


def rayleigh_quotient_p(graph, u, p, eps=0.0):
    """``<Delta_p u, u> / ||u||_2^2`` with the diffusive p-Laplacian."""
    u = np.asarray(u, dtype=np.float64)
    nrm2 = float(u @ u)
    if nrm2 == 0.0:
        raise DomainError("Rayleigh quotient undefined for the zero vector")
    return float(p_laplacian(graph, u, p, eps) @ u) / nrm2


def regime_index(C_F, lambda_p, gamma):
    """Signed margin ``C_F - lambda_p + gamma``."""
    return C_F - lambda_p + gamma


@dataclass
class SpectralEstimate:
    """Everything the regime machinery needs about one graph."""

    lambda_p: float
    eigenvector: np.ndarray
    gamma: float
    gamma_basis: str
    iterations: int
    residual: float
    converged: bool
    p: float
    lambda_choice: str = "dominant"
    lambda_dominant: float | None = None
    lambda_gap: float | None = None
    gamma_by_basis: dict = field(default_factory=dict)
    gamma_converged: dict = field(default_factory=dict)
    eigen_converged: bool = False

    def to_dict(self):
        return {
            "p": self.p,
            "lambda_p": self.lambda_p,
            "lambda_choice": self.lambda_choice,
            "lambda_dominant": self.lambda_dominant,
            "lambda_gap": self.lambda_gap,
            "eigen_iterations": self.iterations,
            "eigen_residual": self.residual,
            "eigen_converged": self.eigen_converged,
            "converged": self.converged,
            "gamma": self.gamma,
            "gamma_basis": self.gamma_basis,
            "gamma_by_basis": dict(self.gamma_by_basis),
            "gamma_converged": dict(self.gamma_converged),
        }


def estimate_spectrum(
    graph,
    p,
    gamma_basis="raw_adjacency",
    lambda_choice="dominant",
    tol=1e-10,
    max_iter=20000,
    seed=123456,
):
    """Compute lambda_p and Gamma under both bases; select the configured ones.

    ``lambda_choice='gap'`` is only available at ``p = 2`` (dense solve).
    """
    if gamma_basis not in GAMMA_BASES:
        raise ParameterError(f"gamma basis must be one of {GAMMA_BASES}, got {gamma_basis!r}")
    if lambda_choice not in LAMBDA_CHOICES:
        raise ParameterError(f"lambda choice must be one of {LAMBDA_CHOICES}")
    if lambda_choice == "gap" and p != 2:
        raise ParameterError("the spectral-gap choice is only defined at p = 2")
    eig = nonlinear_eigenpair(graph, p, tol=tol, max_iter=max_iter, seed=seed)
    gap = laplacian_gap(graph) if p == 2 and graph.n <= 4000 else None
    gammas, gconv = {}, {}
    for basis in GAMMA_BASES:
        r = spectral_radius(graph, basis, tol=min(tol, 1e-12), seed=seed)
        gammas[basis] = r.value
        gconv[basis] = r.converged
    lam = eig.lambda_p if lambda_choice == "dominant" else gap
    return SpectralEstimate(
        lambda_p=lam,
        eigenvector=eig.eigenvector,
        gamma=gammas[gamma_basis],
        gamma_basis=gamma_basis,
        iterations=eig.iterations,
        residual=eig.residual,
        converged=eig.converged and gconv[gamma_basis],
        p=float(p),
        lambda_choice=lambda_choice,
        lambda_dominant=eig.lambda_p,
        lambda_gap=gap,
        gamma_by_basis=gammas,
        gamma_converged=gconv,
        eigen_converged=eig.converged,
    )
