from fastapi import APIRouter, HTTPException, status
import logging

from app.core.config import settings
from app.core.exceptions import PercolationError
from app.schemas.experiment import ExperimentConfig, Report
from app.services.harness import run_experiment

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=Report)
def create_experiment(config: ExperimentConfig):
    """Run an experiment synchronously; files are never written from the API"""
    if config.replicates > settings.MAX_API_REPLICATES:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"At most {settings.MAX_API_REPLICATES} replicates over HTTP"
        )
    try:
        return run_experiment(config.model_copy(update={"output": None, "workers": 1}))
    except PercolationError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=e.message)
    except Exception as e:
        logger.error(f"Experiment error: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Failed to run experiment"
        )
