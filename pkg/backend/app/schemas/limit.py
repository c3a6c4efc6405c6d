from pydantic import BaseModel, Field
from typing import Optional


class Excursion(BaseModel):
    l: float
    r: float
    length: float = Field(..., gt=0.0)
    area: float = Field(..., ge=0.0)
    marks: Optional[int] = None
    open_flag: bool = False


class DensityDiagnostic(BaseModel):
    t: float
    v_max: float
    integral: float
    integrand_at_vmax: float
    converged: bool
