# app/rwwt.py
"""
Random walk with teleportation: with probability c the walker follows a
uniformly chosen edge of the current vertex, otherwise it jumps to a uniformly
chosen vertex. An edge step drawn at a zero-degree vertex becomes a jump.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import sparse

from app.config import settings
from app.errors import ConvergenceError, DomainError, SizeLimitError
from app.graph import Graph, is_connected, mean_degree
from app.schemas import TeleportConfig

logger = logging.getLogger(__name__)


def step(g: Graph, current: int, cfg: TeleportConfig, rng: np.random.Generator) -> Tuple[int, bool]:
    """One transition; returns (next vertex, whether a jump occurred)."""
    if rng.random() < cfg.c and g.degrees[current] > 0:
        nbrs = g.neighbors(current)
        return int(nbrs[rng.integers(nbrs.size)]), False
    return int(rng.integers(g.n)), True


def _check_cap(g: Graph, cap: Optional[int]) -> None:
    limit = settings.DENSE_CAP if cap is None else cap
    if g.n > limit:
        raise SizeLimitError(f"graph has {g.n} vertices, above the cap of {limit}")
    if g.n < 1:
        raise DomainError("empty graph")


def _walk_operator(g: Graph) -> Tuple[sparse.csr_matrix, np.ndarray]:
    """Row-normalized adjacency D^-1 A (zero rows at isolated vertices) and the isolated mask."""
    deg = g.degrees.astype(float)
    isolated = g.degrees == 0
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=~isolated)
    return sparse.diags(inv) @ g.to_sparse().astype(float), isolated


def transition_matrix(g: Graph, cfg: TeleportConfig, cap: Optional[int] = None) -> np.ndarray:
    """Dense P with P[u, v] = P(next = v | current = u)."""
    _check_cap(g, cap)
    n = g.n
    walk, isolated = _walk_operator(g)
    P = cfg.c * walk.toarray() + (1.0 - cfg.c) / n
    P[isolated, :] += cfg.c / n
    return P


def _propagate(pi: np.ndarray, walk_t: sparse.csr_matrix, isolated: np.ndarray, c: float) -> np.ndarray:
    n = pi.size
    stuck = pi[isolated].sum()
    return c * (walk_t @ pi) + ((1.0 - c) + c * stuck) / n


def exact_stationary(
    g: Graph,
    cfg: TeleportConfig,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
    cap: Optional[int] = None,
) -> np.ndarray:
    """
    Stationary vector by power iteration from the uniform vector, using the
    split form c * (sparse walk) + (1 - c) * (uniform jump).
    """
    _check_cap(g, cap)
    c = cfg.c
    if c == 1.0 and not is_connected(g):
        raise DomainError("c = 1 on a disconnected graph has no unique stationary distribution")

    walk, isolated = _walk_operator(g)
    walk_t = walk.T.tocsr()
    pi = np.full(g.n, 1.0 / g.n)
    for it in range(1, max_iter + 1):
        nxt = _propagate(pi, walk_t, isolated, c)
        nxt /= nxt.sum()
        diff = np.abs(nxt - pi).sum()
        pi = nxt
        if diff < tol:
            logger.debug("[rwwt] power iteration converged after %d steps (L1 change %.3g)", it, diff)
            return pi
    raise ConvergenceError(f"power iteration did not reach tol={tol} in {max_iter} steps (periodic or reducible chain?)")


def stationary_residual(g: Graph, cfg: TeleportConfig, pi: np.ndarray) -> float:
    """L1 norm of pi P - pi."""
    walk, isolated = _walk_operator(g)
    return float(np.abs(_propagate(np.asarray(pi, dtype=float), walk.T.tocsr(), isolated, cfg.c) - pi).sum())


def cm_stationary_approx(degrees: Sequence[int], cfg: TeleportConfig, mean_degree: Optional[float] = None) -> np.ndarray:
    """
    Closed-form stationary distribution on a configuration-model graph,
    pi_v proportional to c * d_v / E(D) + 1 - c, renormalized to sum to 1.
    E(D) defaults to the mean of `degrees`.
    """
    d = np.asarray(degrees, dtype=float)
    if d.size == 0:
        raise DomainError("no degrees given")
    ed = float(d.mean()) if mean_degree is None else float(mean_degree)
    c = cfg.c
    if c > 0 and ed <= 0:
        raise DomainError("E(D) must be positive when c > 0")
    w = c * d / ed + (1.0 - c) if c > 0 else np.ones_like(d)
    return w / w.sum()


@dataclass(frozen=True)
class WalkResult:
    counts: np.ndarray
    jumps: int
    steps: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.steps


def simulate_walk(
    g: Graph,
    cfg: TeleportConfig,
    steps: int,
    rng: np.random.Generator,
    start: Optional[int] = None,
) -> WalkResult:
    """Visit counts of Z_1..Z_steps, starting from a uniform (or given) vertex."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if g.n < 1:
        raise DomainError("empty graph")
    n = g.n
    cur = int(rng.integers(n)) if start is None else int(start)

    follow = (rng.random(steps) < cfg.c).tolist()
    target = rng.integers(0, n, size=steps).tolist()
    pick = rng.random(steps).tolist()
    indptr = g.indptr.tolist()
    indices = g.indices.tolist()
    deg = g.degrees.tolist()

    counts = [0] * n
    jumps = 0
    for t in range(steps):
        d = deg[cur]
        if follow[t] and d:
            cur = indices[indptr[cur] + int(pick[t] * d)]
        else:
            cur = target[t]
            jumps += 1
        counts[cur] += 1
    return WalkResult(counts=np.array(counts, dtype=np.int64), jumps=jumps, steps=steps)


def validate_stationary(
    g: Graph,
    cfg: TeleportConfig,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
) -> pd.DataFrame:
    """Per-vertex comparison of the power-iteration oracle with the closed form."""
    exact = exact_stationary(g, cfg, tol=tol, max_iter=max_iter)
    approx = cm_stationary_approx(g.degrees, cfg, mean_degree=mean_degree(g))
    return pd.DataFrame(
        {
            "vertex": [g.label(u) for u in range(g.n)],
            "degree": g.degrees,
            "pi_exact": exact,
            "pi_approx": approx,
            "relative_error": np.abs(approx - exact) / exact,
        }
    )
