from fastapi import APIRouter, HTTPException, status
import logging

from app.core.config import settings
from app.core.exceptions import PercolationError
from app.core.rng import PHASE_LIMIT, PHASE_MARKS, make_rng
from app.schemas.api import LimitRequest, LimitResponse
from app.services.degrees import mean_degree_oracle
from app.services.limit import excursions, mark_surplus, simulate_limit_path, truncated_theta, z_limit

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=LimitResponse)
def simulate_limit(request: LimitRequest):
    """Simulate one path of the limiting process and its marked excursions"""
    try:
        model = request.model
        mu = request.mu or mean_degree_oracle(model.tau, model.c_f)
        theta = truncated_theta(model, settings.LIMIT_TAIL_THRESHOLD)
        path = simulate_limit_path(
            theta, model.lam, mu, request.horizon, make_rng(model.seed, PHASE_LIMIT),
            tail_threshold=settings.LIMIT_TAIL_THRESHOLD, compensate=request.compensate,
        )
        table = mark_surplus(excursions(path), theta, model.lam, mu, make_rng(model.seed, PHASE_MARKS))
        shown = min(request.top, len(table))
        return LimitResponse(
            K=theta.K,
            tail_sq=theta.tail_sq,
            mu=mu,
            jumps=path.num_jumps,
            slope=path.slope,
            excursions=[table[i] for i in range(shown)],
            z=z_limit(table, request.top),
        )
    except PercolationError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=e.message)
    except Exception as e:
        logger.error(f"Limit simulation error: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Failed to simulate limit path"
        )
