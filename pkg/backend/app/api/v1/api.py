from fastapi import APIRouter
from app.api.v1.endpoints import degrees, percolation, limit, experiments

api_router = APIRouter()

# Include all endpoint routers
api_router.include_router(degrees.router, prefix="/degrees", tags=["degrees"])
api_router.include_router(percolation.router, prefix="/percolation", tags=["percolation"])
api_router.include_router(limit.router, prefix="/limit", tags=["limit"])
api_router.include_router(experiments.router, prefix="/experiments", tags=["experiments"])
