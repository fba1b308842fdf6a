# app/netgen.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import stats

from app.errors import DomainError
from app.graph import Graph, mean_degree
from app.schemas import DegreeModel, Explicit, GenerationReport, LogNormal, PowerLawCutoff, TraitConfig

logger = logging.getLogger(__name__)

PMF_TOL = 1e-9


@dataclass(frozen=True)
class DegreePmf:
    support: np.ndarray  # ascending integer degrees
    pmf: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.pmf))

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.pmf)
        c[-1] = 1.0
        return c


# ---------- degree distributions ----------
def discretize(model: DegreeModel) -> DegreePmf:
    """
    Integer pmf for a degree model.

    The power law is evaluated at each integer of its support; the log-normal
    puts the mass of [d, d + 1) on d. Both are renormalized by their discrete
    sum over the truncated support.
    """
    if isinstance(model, PowerLawCutoff):
        if model.alpha <= 1 or model.lam < 0 or model.d_min < 1 or model.d_max < model.d_min:
            raise DomainError(f"invalid power-law-cutoff parameters: {model.model_dump()}")
        d = np.arange(model.d_min, model.d_max + 1, dtype=np.int64)
        log_w = -model.alpha * np.log(d) - model.lam * d
        w = np.exp(log_w - log_w.max())
        return DegreePmf(support=d, pmf=w / w.sum())

    if isinstance(model, LogNormal):
        if model.sigma <= 0 or model.d_max < 1 or not math.isfinite(model.theta):
            raise DomainError(f"invalid log-normal parameters: {model.model_dump()}")
        # mass of [d, d + 1): the degree is the integer part of a log-normal draw
        d = np.arange(1, model.d_max + 1, dtype=np.int64)
        edges = stats.lognorm.cdf(np.arange(1, model.d_max + 2), s=model.sigma, scale=math.exp(model.theta))
        w = np.diff(edges)
        if not w.sum() > 0:
            raise DomainError("log-normal puts no mass on {1..d_max}")
        return DegreePmf(support=d, pmf=w / w.sum())

    if isinstance(model, Explicit):
        return _explicit_pmf(model)

    raise DomainError(f"unknown degree model {model!r}")


def _explicit_pmf(model: Explicit) -> DegreePmf:
    if not model.pmf:
        raise DomainError("explicit pmf is empty")
    d = np.array([deg for deg, _ in model.pmf], dtype=np.int64)
    p = np.array([prob for _, prob in model.pmf], dtype=float)
    if (d < 0).any() or (p < 0).any() or not np.isfinite(p).all():
        raise DomainError("explicit pmf needs non-negative degrees and probabilities")
    if abs(p.sum() - 1.0) > PMF_TOL:
        raise DomainError(f"explicit pmf sums to {p.sum()!r}, not 1")
    if model.d_max is not None:
        keep = d <= model.d_max
        d, p = d[keep], p[keep]
        if not p.sum() > 0:
            raise DomainError("d_max truncates away the whole explicit pmf")

    support, inverse = np.unique(d, return_inverse=True)
    merged = np.zeros(support.size)
    np.add.at(merged, inverse, p)
    keep = merged > 0
    support, merged = support[keep], merged[keep]
    return DegreePmf(support=support, pmf=merged / merged.sum())


def sample_degree_sequence(model: DegreeModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. degrees by inverse-CDF lookup."""
    if n < 1:
        raise DomainError("need at least one vertex")
    dist = discretize(model)
    u = rng.random(n)
    return dist.support[np.searchsorted(dist.cdf, u, side="right")]


# ---------- configuration model ----------
def build_configuration_model(n: int, model: DegreeModel, rng: np.random.Generator) -> Tuple[Graph, GenerationReport]:
    """
    Erased configuration model: one uniform stub matching, then self-loops
    are removed and multiedges collapsed.
    """
    if n < 2:
        raise DomainError("configuration model needs n >= 2")
    drawn = sample_degree_sequence(model, n, rng)
    u, v, report = _match_stubs(drawn, rng)
    g = Graph.from_pairs(n, u, v)
    report.realized_mean_degree = mean_degree(g)
    logger.debug(
        "[netgen] n=%d drawn mean %.3f realized mean %.3f (erased %d loops, %d multiedges)",
        n, report.drawn_mean_degree, report.realized_mean_degree,
        report.erased_self_loops, report.collapsed_multiedges,
    )
    return g, report


def _match_stubs(degrees: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, GenerationReport]:
    n = degrees.size
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    dropped = 0
    if stubs.size % 2:
        stubs = np.delete(stubs, rng.integers(stubs.size))
        dropped = 1
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)

    loops = pairs[:, 0] == pairs[:, 1]
    pairs = pairs[~loops]
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    keys = np.unique(lo * n + hi)

    report = GenerationReport(
        n=n,
        drawn_mean_degree=float(degrees.mean()),
        realized_mean_degree=0.0,
        erased_self_loops=int(loops.sum()),
        collapsed_multiedges=int(pairs.shape[0] - keys.size),
        dropped_stubs=dropped,
    )
    return keys // n, keys % n, report


def build_two_component(n1: int, n2: int, model: DegreeModel, rng: np.random.Generator) -> Tuple[Graph, GenerationReport]:
    """Two independent configuration-model groups on [0, n1) and [n1, n1 + n2)."""
    if n1 < 2 or n2 < 2:
        raise DomainError("each group needs at least 2 vertices")
    d1 = sample_degree_sequence(model, n1, rng)
    u1, v1, r1 = _match_stubs(d1, rng)
    d2 = sample_degree_sequence(model, n2, rng)
    u2, v2, r2 = _match_stubs(d2, rng)

    g = Graph.from_pairs(n1 + n2, np.concatenate([u1, u2 + n1]), np.concatenate([v1, v2 + n1]))
    report = GenerationReport(
        n=n1 + n2,
        components=2,
        drawn_mean_degree=float(np.concatenate([d1, d2]).mean()),
        realized_mean_degree=mean_degree(g),
        erased_self_loops=r1.erased_self_loops + r2.erased_self_loops,
        collapsed_multiedges=r1.collapsed_multiedges + r2.collapsed_multiedges,
        dropped_stubs=r1.dropped_stubs + r2.dropped_stubs,
    )
    return g, report


# ---------- traits ----------
def trait_count(n: int, prevalence: float) -> int:
    # half-up rounding
    return int(math.floor(prevalence * n + 0.5))


def assign_trait(g: Graph, cfg: TraitConfig, rng: np.random.Generator) -> np.ndarray:
    """
    y = 1 for the round(prevalence * n) highest-degree vertices (ties by
    ascending index), then one pass in index order swapping each vertex's
    value with a uniform partner (possibly itself) with probability swap_prob.
    """
    n = g.n
    y = np.zeros(n, dtype=np.int64)
    k = trait_count(n, cfg.prevalence)
    order = np.lexsort((np.arange(n), -g.degrees))
    y[order[:k]] = 1

    swap = rng.random(n) < cfg.swap_prob
    partner = rng.integers(0, n, size=n)
    for v in np.flatnonzero(swap):
        w = partner[v]
        y[v], y[w] = y[w], y[v]
    return y
