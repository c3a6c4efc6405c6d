from fastapi import APIRouter, HTTPException, status
import logging

from app.core.exceptions import PercolationError, SupercriticalRangeError
from app.core.rng import PHASE_DEGREES, make_rng, stream_seed
from app.schemas.api import DegreesRequest, DegreesResponse
from app.schemas.degrees import AssumptionTolerances
from app.services.degrees import build_degrees, theta_limits, validate_assumption1
from app.services.params import critical_p, criticality_parameter, exponents

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=DegreesResponse)
def generate_degrees(request: DegreesRequest):
    """Build a power-law degree sequence and check it against its hub limits"""
    try:
        rng = make_rng(request.model.seed, PHASE_DEGREES)
        degrees = build_degrees(
            request.model, request.case.value, rng, stream_seed(request.model.seed, (PHASE_DEGREES,))
        )
        theta = theta_limits(request.model, request.hub_count)
        report = validate_assumption1(degrees, theta, AssumptionTolerances(hub_count=request.hub_count))
        nu = criticality_parameter(degrees)
        try:
            p_c = critical_p(request.model.lam, nu)
        except SupercriticalRangeError:
            p_c = None
        return DegreesResponse(
            n=degrees.n,
            total=degrees.total,
            mu=degrees.mu,
            nu_n=nu,
            p_c=p_c,
            exponents=exponents(request.model.tau),
            hubs=degrees.d[: request.hub_count].tolist(),
            validation=report,
            degrees=degrees.d.tolist() if request.include_degrees else None,
        )
    except PercolationError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=e.message)
    except Exception as e:
        logger.error(f"Degree generation error: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Failed to generate degrees"
        )
