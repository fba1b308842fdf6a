# app/estimators.py
"""
Prevalence estimators for RDS samples.

All three estimators are Hansen-Hurwitz ratio estimators
    mu = sum(y_u / pi_u) / sum(1 / pi_u)
with different draw-wise selection probabilities pi_u:
    sample mean     pi_u ~ 1
    Volz-Heckathorn pi_u ~ d_u
    teleport (T)    pi_u ~ c * d_u / E(D) + 1 - c
where c and E(D) are estimated from the sample itself: c from the share of
seeds, E(D) as a minimum-variance combination of the seed mean degree and the
harmonic mean degree of the recruited (non-seed) respondents.
"""
from __future__ import annotations

import logging
from typing import List, Optional, Sequence

import numpy as np

from app.errors import DomainError, NoSeedsError
from app.rds import RdsSample
from app.schemas import EstimateReport

logger = logging.getLogger(__name__)


def _require_records(s: RdsSample) -> None:
    if len(s) == 0:
        raise DomainError("empty sample")


def _require_positive_degrees(d: np.ndarray) -> None:
    if d.size and d.min() < 1:
        raise DomainError(f"degree {int(d.min())} reported; every respondent needs degree >= 1")


# ---------- generic ----------
def hansen_hurwitz_ratio(y: Sequence[float], pi: Sequence[float]) -> float:
    y = np.asarray(y, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if y.size == 0 or y.shape != pi.shape:
        raise DomainError("need matching, non-empty y and pi")
    if not (pi > 0).all():
        raise DomainError("selection probabilities must be positive")
    inv = 1.0 / pi
    return float(np.sum(y * inv) / np.sum(inv))


# ---------- baselines ----------
def sample_mean(s: RdsSample) -> float:
    _require_records(s)
    return float(np.mean(s.y))


def vh_estimate(s: RdsSample) -> float:
    _require_records(s)
    _require_positive_degrees(s.degrees)
    inv = 1.0 / s.degrees
    return float(np.sum(s.y * inv) / np.sum(inv))


# ---------- teleport parameters ----------
def estimate_c(s: RdsSample) -> float:
    """c_hat = 1 - m / n_S."""
    _require_records(s)
    return 1.0 - s.num_seeds / len(s)


def ed_seeds(s: RdsSample) -> float:
    d = s.degrees[s.is_seed]
    if d.size == 0:
        raise NoSeedsError("no seed records to estimate E(D) from")
    return float(d.mean())


def var_ed_seeds(s: RdsSample) -> Optional[float]:
    """s_J^2 / m with the (m - 1)-divisor sample variance; None for a single seed."""
    d = s.degrees[s.is_seed].astype(float)
    if d.size == 0:
        raise NoSeedsError("no seed records to estimate Var(E(D)_J) from")
    if d.size < 2:
        return None
    return float(np.var(d, ddof=1) / d.size)


def ed_rw(s: RdsSample) -> float:
    """Harmonic mean degree of the non-seed records."""
    d = s.degrees[~s.is_seed]
    if d.size == 0:
        raise DomainError("no non-seed records to estimate E(D) from")
    _require_positive_degrees(d)
    return float(d.size / np.sum(1.0 / d))


def var_ed_rw(s: RdsSample) -> Optional[float]:
    """Delta-method variance of the harmonic-mean estimate; None for a single non-seed."""
    d = s.degrees[~s.is_seed]
    if d.size == 0:
        raise DomainError("no non-seed records to estimate Var(E(D)_RW) from")
    _require_positive_degrees(d)
    if d.size < 2:
        return None
    inv = 1.0 / d
    mean_inv = float(inv.mean())
    return float(np.var(inv, ddof=1) / d.size / mean_inv**4)


def optimal_weight(var_j: Optional[float], var_rw: Optional[float]) -> float:
    """
    Weight on the seed estimate minimizing w^2 var_j + (1 - w)^2 var_rw.

    Undefined variances act as infinite ones; two zero (or two undefined)
    variances split evenly.
    """
    if var_j is None and var_rw is None:
        return 0.5
    if var_j is None:
        return 0.0
    if var_rw is None:
        return 1.0
    total = var_j + var_rw
    if total <= 0:
        return 0.5
    return float(var_rw / total)


def composite_ed(ed_j: float, ed_rw_: float, w: float) -> float:
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"composite weight {w} outside [0, 1]")
    return w * ed_j + (1.0 - w) * ed_rw_


def selection_weights(s: RdsSample, c_hat: float, ed_hat: float) -> np.ndarray:
    """Unnormalized pi_u ~ c_hat * d_u / ed_hat + 1 - c_hat."""
    _require_positive_degrees(s.degrees)
    if c_hat > 0 and ed_hat <= 0:
        raise DomainError("E(D) estimate must be positive when c_hat > 0")
    if c_hat == 0:
        return np.ones(len(s))
    return c_hat * s.degrees / ed_hat + (1.0 - c_hat)


# ---------- full pipeline ----------
def teleport_estimate(s: RdsSample, exclude_seeds: bool = False) -> EstimateReport:
    """
    Teleport estimate of the mean of y with every intermediate quantity.

    With exclude_seeds the seeds are dropped first; the pipeline then sees no
    seeds, c_hat = 1 and the estimate coincides with Volz-Heckathorn.
    """
    _require_records(s)
    if exclude_seeds:
        s = s.subset(~s.is_seed)
        if len(s) == 0:
            raise DomainError("sample has no non-seed records left after excluding seeds")
    _require_positive_degrees(s.degrees)

    n_s, m = len(s), s.num_seeds
    flags: List[str] = []
    c_hat = estimate_c(s)

    e_j = v_j = e_rw = v_rw = None
    if m == 0:
        flags.append("no_seeds")
    else:
        e_j, v_j = ed_seeds(s), var_ed_seeds(s)
        if m == 1:
            flags.append("single_seed")
    if m == n_s:
        flags.extend(["all_seeds", "no_nonseeds"])
    else:
        e_rw, v_rw = ed_rw(s), var_ed_rw(s)
        if n_s - m == 1:
            flags.append("single_nonseed")
    if v_j == 0 and v_rw == 0:
        flags.append("zero_variance_both")

    if e_j is None:
        w = 0.0
    elif e_rw is None:
        w = 1.0
    else:
        w = optimal_weight(v_j, v_rw)
    ed_hat = composite_ed(e_j if e_j is not None else 0.0, e_rw if e_rw is not None else 0.0, w)

    pi = selection_weights(s, c_hat, ed_hat)
    mu_t = hansen_hurwitz_ratio(s.y, pi)
    if flags:
        logger.debug("[estimate] n_s=%d m=%d degenerate: %s", n_s, m, ",".join(flags))

    return EstimateReport(
        n_s=n_s,
        m=m,
        c_hat=c_hat,
        ed_seeds=e_j,
        var_ed_seeds=v_j,
        ed_rw=e_rw,
        var_ed_rw=v_rw,
        w_star=w,
        ed_hat=ed_hat,
        weights=pi.tolist(),
        mu_t=mu_t,
        mu_vh=vh_estimate(s),
        mu_sm=sample_mean(s),
        degenerate_flags=flags,
        seeds_excluded=exclude_seeds,
    )
