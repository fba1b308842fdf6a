# app/tasks.py
from __future__ import annotations

import logging
from typing import Any, Dict

from celery import Celery
from pydantic import ValidationError

from app.config import settings
from app.errors import RdsWalkError
from app.schemas import ExperimentSpec

# ---------- Celery app ----------
celery_app = Celery("rdswalk", broker=settings.CELERY_BROKER_URL, backend=settings.CELERY_RESULT_BACKEND)
celery_app.conf.update(task_serializer="json", result_serializer="json", accept_content=["json"])

logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)


@celery_app.task(name="app.tasks.run_network_block")
def run_network_block_task(spec_json: str, network: int) -> Dict[str, Any]:
    """
    One network sample with all of its (m, replication) pairs.

    Always returns a dict; a block that cannot run at all comes back with
    status FAILED and every replication marked failed.
    """
    from app import harness

    try:
        spec = ExperimentSpec.model_validate_json(spec_json)
    except ValidationError as e:
        logger.exception("[task] bad experiment spec")
        return {"network": network, "status": "FAILED", "true_prevalence": None, "replications": [],
                "error": e.__class__.__name__, "detail": str(e)}

    try:
        block = harness.run_network_block(spec, network)
        logger.info("[task] network %d done (%d replications)", network, len(block["replications"]))
        return block
    except RdsWalkError as e:
        logger.exception("[task] network %d failed", network)
        out = harness.failed_block(spec, network, e.code, e.detail)
    except Exception as e:
        logger.exception("[task] unexpected failure on network %d", network)
        out = harness.failed_block(spec, network, e.__class__.__name__, str(e))
    return out
