# app/rds.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from app.errors import DomainError
from app.graph import Graph
from app.schemas import RdsConfig

logger = logging.getLogger(__name__)

SAMPLE_COLUMNS = ("id", "degree", "y", "is_seed", "recruiter", "wave")


@dataclass(frozen=True)
class RdsSample:
    """
    Ordered respondent records, stored column-wise.

    Row i is one respondent: ids[i], degrees[i], y[i], is_seed[i],
    recruiter[i] (None for seeds) and wave[i].
    """

    ids: tuple
    degrees: np.ndarray
    y: np.ndarray
    is_seed: np.ndarray
    recruiter: tuple
    wave: np.ndarray

    @classmethod
    def from_records(cls, records: Iterable[Dict[str, Any]]) -> "RdsSample":
        rows = list(records)
        return cls(
            ids=tuple(str(r["id"]) for r in rows),
            degrees=np.array([int(r["degree"]) for r in rows], dtype=np.int64),
            y=np.array([int(r["y"]) for r in rows], dtype=np.int64),
            is_seed=np.array([bool(r["is_seed"]) for r in rows], dtype=bool),
            recruiter=tuple(None if r.get("recruiter") in (None, "") else str(r["recruiter"]) for r in rows),
            wave=np.array([int(r.get("wave", 0)) for r in rows], dtype=np.int64),
        )

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def num_seeds(self) -> int:
        return int(self.is_seed.sum())

    def records(self) -> List[Dict[str, Any]]:
        return [
            {
                "id": self.ids[i],
                "degree": int(self.degrees[i]),
                "y": int(self.y[i]),
                "is_seed": bool(self.is_seed[i]),
                "recruiter": self.recruiter[i],
                "wave": int(self.wave[i]),
            }
            for i in range(len(self))
        ]

    def subset(self, mask: np.ndarray) -> "RdsSample":
        return self.permuted(np.flatnonzero(mask))

    def permuted(self, order: Sequence[int]) -> "RdsSample":
        idx = np.asarray(order, dtype=np.int64)
        return RdsSample(
            ids=tuple(self.ids[i] for i in idx),
            degrees=self.degrees[idx],
            y=self.y[idx],
            is_seed=self.is_seed[idx],
            recruiter=tuple(self.recruiter[i] for i in idx),
            wave=self.wave[idx],
        )


def check_sample(s: RdsSample, target_size: Optional[int] = None) -> List[str]:
    """Return the list of violated sample invariants (empty when the sample is well-formed)."""
    problems: List[str] = []
    if len(set(s.ids)) != len(s.ids):
        problems.append("duplicate ids")
    wave_of: Dict[str, int] = {}
    for i, rid in enumerate(s.ids):
        seed = bool(s.is_seed[i])
        rec = s.recruiter[i]
        if seed != (rec is None) or seed != (s.wave[i] == 0):
            problems.append(f"record {i}: seed flag, recruiter and wave disagree")
        if rec is not None:
            if rec not in wave_of:
                problems.append(f"record {i}: recruiter {rec} not listed earlier")
            elif wave_of[rec] != s.wave[i] - 1:
                problems.append(f"record {i}: wave {s.wave[i]} does not follow recruiter wave {wave_of[rec]}")
        wave_of[rid] = int(s.wave[i])
    if target_size is not None and len(s) > target_size:
        problems.append(f"sample size {len(s)} exceeds target {target_size}")
    return problems


def seed_fraction(s: RdsSample) -> float:
    if len(s) == 0:
        raise DomainError("seed fraction of an empty sample is undefined")
    return s.num_seeds / len(s)


# ---------- simulation ----------
def run_rds(
    g: Graph,
    traits: np.ndarray,
    cfg: RdsConfig,
    rng: np.random.Generator,
    seeds: Optional[Sequence[int]] = None,
) -> RdsSample:
    """
    Multi-seed, coupon-limited recruitment without replacement.

    Seeds are drawn uniformly without replacement and recruit in synchronous
    waves. Within a wave recruiters act in shuffled order, each handing out up
    to `coupons` invitations to uniformly chosen neighbours that are neither
    sampled nor already invited; every invitee participates. Recruitment stops
    at exactly target_size records or when a wave recruits nobody (unless
    replenish_seeds adds a fresh uniform seed).

    `seeds` pins the initial seeds instead of drawing them; its length must
    equal num_seeds.
    """
    n = g.n
    m = cfg.num_seeds
    if m > n:
        raise DomainError(f"cannot draw {m} seeds from {n} vertices")
    traits = np.asarray(traits)
    if traits.shape != (n,):
        raise DomainError("trait vector must have one entry per vertex")

    target = cfg.target_size
    taken = np.zeros(n, dtype=bool)
    order: List[int] = []
    recruiter: List[int] = []
    wave: List[int] = []

    def admit(v: int, by: int, w: int) -> None:
        taken[v] = True
        order.append(v)
        recruiter.append(by)
        wave.append(w)

    if seeds is None:
        seeds = rng.choice(n, size=m, replace=False)
    elif len(seeds) != m or len(set(int(v) for v in seeds)) != m:
        raise DomainError(f"expected {m} distinct seeds, got {list(seeds)}")
    elif any(not 0 <= int(v) < n for v in seeds):
        raise DomainError("seed vertex out of range")
    for v in seeds:
        admit(int(v), -1, 0)
    frontier = [int(v) for v in seeds]
    current_wave = 0

    while len(order) < target:
        recruits: List[int] = []
        for r in rng.permutation(len(frontier)):
            u = frontier[r]
            nbrs = g.neighbors(u)
            eligible = nbrs[~taken[nbrs]]
            if eligible.size == 0:
                continue
            k = min(cfg.coupons, eligible.size, target - len(order))
            for v in rng.choice(eligible, size=k, replace=False):
                admit(int(v), u, current_wave + 1)
                recruits.append(int(v))
            if len(order) >= target:
                break

        if recruits:
            frontier = recruits
            current_wave += 1
            continue
        if not cfg.replenish_seeds:
            break
        pool = np.flatnonzero(~taken)
        if pool.size == 0:
            break
        fresh = int(rng.choice(pool))
        logger.debug("[rds] recruitment died at %d records; replenishing with seed %d", len(order), fresh)
        admit(fresh, -1, 0)
        frontier = [fresh]
        # fresh seeds restart their own chain at wave 0; later waves count from it
        current_wave = 0

    idx = np.array(order, dtype=np.int64)
    return RdsSample(
        ids=tuple(g.label(v) for v in order),
        degrees=g.degrees[idx].astype(np.int64),
        y=traits[idx].astype(np.int64),
        is_seed=np.array([r < 0 for r in recruiter], dtype=bool),
        recruiter=tuple(None if r < 0 else g.label(r) for r in recruiter),
        wave=np.array(wave, dtype=np.int64),
    )
