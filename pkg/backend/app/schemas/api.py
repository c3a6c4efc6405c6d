from enum import Enum
from pydantic import BaseModel, Field
from typing import List, Optional

from app.schemas.degrees import ValidationReport
from app.schemas.experiment import DegreeCase
from app.schemas.explore import ComponentRecord, ZVector
from app.schemas.graph import DiagnosticsReport
from app.schemas.limit import Excursion
from app.schemas.params import Exponents, ModelParams


class PercolationMethodName(str, Enum):
    RETAIN = "retain"
    FOUNTOULAKIS = "fountoulakis"


class DegreesRequest(BaseModel):
    model: ModelParams
    case: DegreeCase = DegreeCase.QUANTILE
    hub_count: int = Field(default=10, ge=1, le=1000)
    include_degrees: bool = False


class DegreesResponse(BaseModel):
    n: int
    total: int
    mu: float
    nu_n: float
    p_c: Optional[float] = None
    exponents: Exponents
    hubs: List[int]
    validation: ValidationReport
    degrees: Optional[List[int]] = None


class PercolationRequest(BaseModel):
    model: ModelParams
    case: DegreeCase = DegreeCase.QUANTILE
    p: Optional[float] = Field(None, ge=0.0, le=1.0)
    p_exponent: Optional[float] = Field(None, gt=0.0)
    method: PercolationMethodName = PercolationMethodName.RETAIN
    top: int = Field(default=10, ge=1, le=1000)


class PercolationResponse(BaseModel):
    p: float
    method: str
    retained_total: int
    dummy_added: bool
    diagnostics: DiagnosticsReport
    components: List[ComponentRecord]
    z: ZVector


class LimitRequest(BaseModel):
    model: ModelParams
    horizon: float = Field(default=30.0, gt=0.0)
    mu: Optional[float] = Field(None, gt=0.0)
    top: int = Field(default=10, ge=1, le=1000)
    compensate: bool = False


class LimitResponse(BaseModel):
    K: int
    tail_sq: float
    mu: float
    jumps: int
    slope: float
    excursions: List[Excursion]
    z: ZVector
