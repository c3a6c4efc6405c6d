from fastapi import APIRouter, HTTPException, status
import logging

from app.core.exceptions import PercolationError
from app.core.rng import PHASE_DEGREES, PHASE_EXPLORATION, PHASE_PERCOLATION, make_rng, stream_seed
from app.schemas.api import PercolationMethodName, PercolationRequest, PercolationResponse
from app.services.degrees import build_degrees
from app.services.explore import components_from_trace, explore, z_vector
from app.services.graph import percolate_fountoulakis, percolate_retain, percolated_degree_diagnostics
from app.services.params import critical_p, criticality_parameter, exponents, power_p

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=PercolationResponse)
def run_percolation(request: PercolationRequest):
    """Percolate one configuration model and explore its components"""
    try:
        seed = request.model.seed
        degrees = build_degrees(
            request.model, request.case.value, make_rng(seed, PHASE_DEGREES), stream_seed(seed, (PHASE_DEGREES,))
        )
        if request.p is not None:
            p = request.p
        elif request.p_exponent is not None:
            p = power_p(degrees.n, request.p_exponent)
        else:
            p = critical_p(request.model.lam, criticality_parameter(degrees))

        percolate = percolate_retain if request.method == PercolationMethodName.RETAIN else percolate_fountoulakis
        outcome = percolate(degrees, p, make_rng(seed, PHASE_PERCOLATION))
        trace = explore(outcome, make_rng(seed, PHASE_EXPLORATION))
        records = components_from_trace(trace, outcome)
        records.sort(key=lambda r: (-r.size, -r.surplus))
        z = z_vector(records, degrees.n, exponents(request.model.tau).rho)

        logger.info(f"Percolated n={degrees.n} at p={p:.4g}: {outcome.retained_total} half-edges kept")
        return PercolationResponse(
            p=p,
            method=outcome.method.value,
            retained_total=outcome.retained_total,
            dummy_added=outcome.dummy_added,
            diagnostics=percolated_degree_diagnostics(outcome, degrees, p),
            components=records[: request.top],
            z=z.model_copy(update={"entries": z.entries[: request.top]}),
        )
    except PercolationError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=e.message)
    except Exception as e:
        logger.error(f"Percolation error: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Failed to run percolation"
        )
