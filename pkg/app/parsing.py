# app/parsing.py
"""
File formats: edge lists, attribute/trait tables, RDS sample tables and
JSON-lines reports.
"""
from __future__ import annotations

import logging
import os
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.errors import DomainError, EdgeListParseError
from app.graph import Graph
from app.rds import SAMPLE_COLUMNS, RdsSample

logger = logging.getLogger(__name__)

# ---------- edge lists ----------
def read_edge_list(path: str) -> List[Tuple[str, str]]:
    """One edge per line, two whitespace-separated tokens; '#' lines and blanks skipped."""
    pairs: List[Tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise EdgeListParseError(f"expected 2 tokens, got {len(tokens)}: {line[:60]!r}", line_no)
            pairs.append((tokens[0], tokens[1]))
    return pairs

def write_edge_list(g: Graph, path: str) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n={g.n} edges={g.num_edges}\n")
        for u, v in g.edges():
            fh.write(f"{g.label(int(u))} {g.label(int(v))}\n")

# ---------- attributes / traits ----------
def read_traits(path: str, g: Graph, trait: Optional[str] = None) -> np.ndarray:
    """
    Per-vertex 0/1 trait vector aligned with g's vertex order.

    The attribute file is a CSV with an `id` column and one or more trait
    columns; `trait` picks a column by name, else the first trait column is used.
    """
    df = pd.read_csv(path, dtype={"id": str}, keep_default_na=False)
    if "id" not in df.columns:
        raise DomainError(f"{path}: attribute file needs an 'id' column")
    columns = [c for c in df.columns if c != "id"]
    if not columns:
        raise DomainError(f"{path}: no trait columns")
    name = trait or columns[0]
    if name not in columns:
        raise DomainError(f"{path}: trait {name!r} not in {columns}")

    values = pd.to_numeric(df[name], errors="coerce")
    if values.isna().any() or not values.isin([0, 1]).all():
        raise DomainError(f"{path}: trait {name!r} must be 0/1")
    if df["id"].duplicated().any():
        raise DomainError(f"{path}: repeated ids")

    by_id = dict(zip(df["id"], values.astype(int)))
    missing = [g.label(u) for u in range(g.n) if g.label(u) not in by_id]
    if missing:
        raise DomainError(f"{path}: {len(missing)} vertices have no {name!r} value (e.g. {missing[:3]})")
    extra = len(by_id) - g.n
    if extra > 0:
        logger.info("[traits] %d attribute rows name vertices absent from the edge list", extra)
    return np.array([by_id[g.label(u)] for u in range(g.n)], dtype=np.int64)

def write_traits(g: Graph, y: np.ndarray, path: str, name: str = "y") -> None:
    _ensure_parent(path)
    df = pd.DataFrame({"id": [g.label(u) for u in range(g.n)], name: np.asarray(y, dtype=np.int64)})
    df.to_csv(path, index=False, lineterminator="\n")

# ---------- samples ----------
def write_sample(s: RdsSample, path: str) -> None:
    _ensure_parent(path)
    df = pd.DataFrame(
        {
            "id": list(s.ids),
            "degree": s.degrees,
            "y": s.y,
            "is_seed": s.is_seed.astype(np.int64),
            "recruiter": ["" if r is None else r for r in s.recruiter],
            "wave": s.wave,
        },
        columns=list(SAMPLE_COLUMNS),
    )
    df.to_csv(path, index=False, lineterminator="\n")

def read_sample(path: str) -> RdsSample:
    df = pd.read_csv(path, dtype={"id": str, "recruiter": str}, keep_default_na=False)
    missing = [c for c in SAMPLE_COLUMNS if c not in df.columns]
    if missing:
        raise DomainError(f"{path}: sample file lacks columns {missing}")
    try:
        degrees = df["degree"].astype(np.int64)
        y = df["y"].astype(np.int64)
        seed = df["is_seed"].map(_parse_flag)
        wave = df["wave"].astype(np.int64)
    except (ValueError, TypeError) as e:
        raise DomainError(f"{path}: {e}") from e
    if seed.isna().any():
        raise DomainError(f"{path}: is_seed must be 0/1 or true/false")
    if not y.isin([0, 1]).all():
        raise DomainError(f"{path}: y must be 0/1")
    return RdsSample(
        ids=tuple(df["id"]),
        degrees=degrees.to_numpy(),
        y=y.to_numpy(),
        is_seed=seed.astype(bool).to_numpy(),
        recruiter=tuple(None if r == "" else r for r in df["recruiter"]),
        wave=wave.to_numpy(),
    )

def _parse_flag(v) -> Optional[bool]:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes"):
        return True
    if s in ("0", "false", "no"):
        return False
    return None

# ---------- reports ----------
def append_jsonl(model: BaseModel, path: str) -> None:
    _ensure_parent(path)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(model.model_dump_json() + "\n")

def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
