"""Product-limit and cumulative-hazard estimates from an event table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

ESTIMATORS = ("kaplan_meier", "nelson_aalen")


@dataclass
class SurvivalCurve:
    """Step functions evaluated at each distinct observation time.

    ``baseline_hazard`` is ``d_k / (n_k * gap_k)`` with ``gap_k`` the distance
    to the previous observation time (the origin for the first one).
    """

    times: np.ndarray
    survival: np.ndarray
    cumulative_hazard: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    censored: np.ndarray
    baseline_hazard: np.ndarray
    estimator: str

    def survival_at(self, t):
        idx = np.searchsorted(self.times, t, side="right") - 1
        return np.where(idx >= 0, self.survival[np.maximum(idx, 0)], 1.0)

    def restricted_mean(self, tmax=None):
        """Area under the survival step function on ``[0, tmax]``."""
        if tmax is None:
            tmax = float(self.times[-1]) if self.times.size else 0.0
        knots = np.concatenate([[0.0], self.times[self.times < tmax], [tmax]])
        levels = np.concatenate([[1.0], self.survival[self.times < tmax]])
        return float(np.sum(np.diff(knots) * levels))

    def to_dict(self):
        return {
            "estimator": self.estimator,
            "times": self.times.tolist(),
            "survival": self.survival.tolist(),
            "cumulative_hazard": self.cumulative_hazard.tolist(),
            "at_risk": self.at_risk.tolist(),
            "events": self.events.tolist(),
            "baseline_hazard": self.baseline_hazard.tolist(),
        }


def _risk_table(time, observed):
    times, inverse = np.unique(time, return_inverse=True)
    d = np.bincount(inverse, weights=observed.astype(float), minlength=times.size)
    total = np.bincount(inverse, minlength=times.size)
    # at risk at t_k: everyone with time >= t_k
    n = total[::-1].cumsum()[::-1]
    return times, d.astype(np.int64), (total - d).astype(np.int64), n.astype(np.int64)


def _product_limit(d, c, n):
    """``prod (1 - d_k/n_k)`` evaluated segment-wise.

    Between censoring times the product telescopes to
    ``(n_k - d_k) / n_start``, so each censoring-free run costs a single
    division.  Without censoring this is exactly the empirical survival.
    """
    starts = np.concatenate([[True], c[:-1] > 0])
    seg = np.cumsum(starts) - 1
    n_start = n[starts][seg]
    within = (n - d) / n_start
    ends = np.concatenate([starts[1:], [True]])
    carry = np.concatenate([[1.0], np.cumprod(within[ends])[:-1]])
    return carry[seg] * within


def estimate_survival(events, estimator="kaplan_meier") -> SurvivalCurve:
    """Kaplan-Meier or Nelson-Aalen estimate; ties are grouped by time.

    Kaplan-Meier reports ``S = prod(1 - d/n)`` and ``H = -log S``;
    Nelson-Aalen reports ``H = sum(d/n)`` and ``S = exp(-H)``.
    """
    if estimator not in ESTIMATORS:
        raise ParameterError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    if len(events) == 0:
        raise ParameterError("event table is empty")
    times, d, c, n = _risk_table(events.time, events.observed)
    q = d / n
    if estimator == "kaplan_meier":
        surv = _product_limit(d, c, n)
        with np.errstate(divide="ignore"):
            chaz = -np.log(surv)
        chaz = np.maximum(chaz, 0.0)
    else:
        chaz = np.cumsum(q)
        surv = np.exp(-chaz)
    gap = np.diff(np.concatenate([[0.0], times]))
    hazard = np.full(times.size, np.nan)
    pos = gap > 0
    hazard[pos] = d[pos] / (n[pos] * gap[pos])
    return SurvivalCurve(times, surv, chaz, n, d, c, hazard, estimator)
