# app/harness.py
"""
Replication experiments: generate networks, run RDS on them for several seed
counts, estimate, and aggregate mean +/- standard error per (m, estimator).

Randomness is counter-based. Every network sample and every replication owns
a numpy SeedSequence built from the master seed and a spawn key:
    network i                        -> (0, i)
    replication r of m seeds on i    -> (1, i, m, r)
so adding seed counts or replications never changes any other stream, and
results do not depend on the order in which blocks are executed.
"""
from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app import netgen, parsing
from app.config import settings
from app.errors import DomainError, RdsWalkError
from app.estimators import teleport_estimate
from app.graph import Graph, connected_components, from_edge_list
from app.rds import run_rds
from app.schemas import (
    AggregateRow,
    ExperimentResult,
    ExperimentSpec,
    GenerationReport,
    RdsConfig,
    ReplicationFailure,
)

logger = logging.getLogger(__name__)

ESTIMATORS = ("T", "VH", "SM")
TABLE_COLUMNS = ["m", "estimator", "mean", "std_error", "replicates", "true_prevalence"]

BLOCK_TASK = "app.tasks.run_network_block"

_NETWORK_STREAM = 0
_REPLICATION_STREAM = 1


# ---------- random streams ----------
def network_rng(master_seed: int, network: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(_NETWORK_STREAM, network)))


def replication_rng(master_seed: int, network: int, m: int, replication: int) -> np.random.Generator:
    key = (_REPLICATION_STREAM, network, m, replication)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


# ---------- networks ----------
def realize_network(spec: ExperimentSpec, network: int) -> Tuple[Graph, np.ndarray, GenerationReport]:
    """Network sample `network` of the spec, with its trait vector."""
    net = spec.network
    if net.edge_list is not None:
        g, ingest = from_edge_list(parsing.read_edge_list(net.edge_list))
        y = parsing.read_traits(net.attributes, g, trait=net.trait)
        degrees = g.degrees.astype(float)
        report = GenerationReport(
            n=g.n,
            components=connected_components(g).count,
            drawn_mean_degree=float(degrees.mean()) if g.n else 0.0,
            realized_mean_degree=float(degrees.mean()) if g.n else 0.0,
            erased_self_loops=ingest.self_loops,
            collapsed_multiedges=ingest.duplicate_edges,
            prevalence=float(y.mean()) if g.n else None,
        )
        return g, y, report

    rng = network_rng(spec.master_seed, network)
    if net.components == 2:
        n1 = net.n // 2
        g, report = netgen.build_two_component(n1, net.n - n1, net.model, rng)
    else:
        g, report = netgen.build_configuration_model(net.n, net.model, rng)
    y = netgen.assign_trait(g, spec.trait, rng)
    report.seed = spec.master_seed
    report.prevalence = float(y.mean())
    return g, y, report


# ---------- one network block ----------
def run_network_block(spec: ExperimentSpec, network: int) -> Dict[str, Any]:
    """
    Every (m, replication) on network sample `network`.

    Replication errors are recorded as FAILED entries and never abort the block.
    """
    g, y, report = realize_network(spec, network)
    reps: List[Dict[str, Any]] = []
    for m in spec.seed_counts:
        cfg = RdsConfig(num_seeds=m, **spec.rds.model_dump())
        for r in range(spec.replications_per_network):
            entry: Dict[str, Any] = {"network": network, "m": m, "replication": r}
            try:
                sample = run_rds(g, y, cfg, replication_rng(spec.master_seed, network, m, r))
                est = teleport_estimate(sample)
                entry.update(status="OK", T=est.mu_t, VH=est.mu_vh, SM=est.mu_sm)
            except RdsWalkError as e:
                logger.warning("[harness] network %d m=%d rep %d failed: %s", network, m, r, e.detail)
                entry.update(status="FAILED", error=e.code, detail=e.detail)
            reps.append(entry)
    return {
        "network": network,
        "status": "OK",
        "true_prevalence": float(report.prevalence),
        "generation": report.model_dump(),
        "replications": reps,
    }


def failed_block(spec: ExperimentSpec, network: int, error: str, detail: str) -> Dict[str, Any]:
    reps = [
        {"network": network, "m": m, "replication": r, "status": "FAILED", "error": error, "detail": detail}
        for m in spec.seed_counts
        for r in range(spec.replications_per_network)
    ]
    return {"network": network, "status": "FAILED", "true_prevalence": None, "replications": reps}


# ---------- aggregation ----------
def aggregate(replications: List[Dict[str, Any]], true_prevalence: float) -> List[AggregateRow]:
    """
    Mean and standard error (sd with n - 1 divisor over sqrt(n)) per
    (m, estimator) over the successful replications.
    """
    ok = sorted(
        (r for r in replications if r.get("status") == "OK"),
        key=lambda r: (r["m"], r["network"], r["replication"]),
    )
    rows: List[AggregateRow] = []
    for m in sorted({r["m"] for r in replications}):
        chunk = [r for r in ok if r["m"] == m]
        if not chunk:
            logger.warning("[harness] every replication failed for m=%d; no row emitted", m)
            continue
        for name in ESTIMATORS:
            values = np.array([r[name] for r in chunk], dtype=float)
            se = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
            rows.append(
                AggregateRow(
                    m=m,
                    estimator=name,
                    mean=float(values.mean()),
                    std_error=se,
                    replicates=int(values.size),
                    true_prevalence=true_prevalence,
                )
            )
    return sorted(rows, key=lambda row: (row.m, row.estimator))


# ---------- orchestration ----------
def _dispatch(spec: ExperimentSpec, sync: bool) -> List[Dict[str, Any]]:
    if not sync:
        try:
            from app.tasks import celery_app

            payload = spec.model_dump_json()
            pending = [celery_app.send_task(BLOCK_TASK, args=[payload, i]) for i in range(spec.network_samples)]
            return [p.get(timeout=settings.TASK_TIMEOUT) for p in pending]
        except Exception as e:
            logger.warning("Celery dispatch failed (%s). Falling back to inline execution.", e)

    blocks = []
    for i in range(spec.network_samples):
        try:
            blocks.append(run_network_block(spec, i))
        except RdsWalkError as e:
            logger.exception("[harness] network block %d failed", i)
            blocks.append(failed_block(spec, i, e.code, e.detail))
    return blocks


def run_experiment(spec: ExperimentSpec, sync: Optional[bool] = None) -> ExperimentResult:
    if spec.network.edge_list is None and max(spec.seed_counts) > spec.network.n:
        raise DomainError(f"seed count {max(spec.seed_counts)} exceeds population size {spec.network.n}")
    sync = settings.EXPERIMENT_SYNC if sync is None else sync

    blocks = sorted(_dispatch(spec, sync), key=lambda b: b["network"])
    replications = [r for b in blocks for r in b["replications"]]
    prevalences = [b["true_prevalence"] for b in blocks if b.get("true_prevalence") is not None]
    true_prevalence = float(np.mean(prevalences)) if prevalences else float("nan")

    failures = [
        ReplicationFailure(
            network=r["network"], m=r["m"], replication=r["replication"],
            error=r.get("error", "UNKNOWN"), detail=r.get("detail", ""),
        )
        for r in replications
        if r.get("status") != "OK"
    ]
    total = spec.network_samples * len(spec.seed_counts) * spec.replications_per_network
    result = ExperimentResult(
        rows=aggregate(replications, true_prevalence),
        replications_total=total,
        replications_failed=len(failures),
        failures=failures,
    )
    logger.info(
        "[harness] %d networks x %d seed counts x %d replications: %d failed",
        spec.network_samples, len(spec.seed_counts), spec.replications_per_network, len(failures),
    )
    return result


def emit_table(rows: List[AggregateRow], path: str) -> None:
    """Aggregate CSV sorted by (m, estimator); identical input gives identical bytes."""
    ordered = sorted(rows, key=lambda row: (row.m, row.estimator))
    df = pd.DataFrame([row.model_dump() for row in ordered], columns=TABLE_COLUMNS)
    parsing._ensure_parent(path)
    df.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
