from enum import Enum
from pydantic import BaseModel, Field, field_validator
from typing import Any, Dict, List, Optional

from app.schemas.params import ModelParams


class ExperimentId(str, Enum):
    CRITICAL_WINDOW = "critical_window"
    DIAMETER = "diameter"
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL = "supercritical"
    LIMIT_COMPARE = "limit_compare"
    HUB_POISSON = "hub_poisson"
    ORACLE_SUITE = "oracle_suite"


class DegreeCase(str, Enum):
    QUANTILE = "quantile"
    IID = "iid"


class OutputFormat(str, Enum):
    JSONL = "jsonl"
    CSV = "csv"


class ExperimentConfig(BaseModel):
    experiment: ExperimentId
    model: ModelParams
    ladder: List[int] = Field(..., min_length=1)
    replicates: int = Field(default=20, ge=1)
    p_exponent: Optional[float] = Field(None, gt=0.0)
    case: DegreeCase = DegreeCase.QUANTILE
    horizon: float = Field(default=30.0, gt=0.0)
    limit_paths: Optional[int] = Field(None, ge=1)
    law_draws: int = Field(default=30000, ge=1)
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.JSONL
    master_seed: int = 0
    workers: int = Field(default=1, ge=1)

    @field_validator("ladder")
    @classmethod
    def ladder_sorted(cls, value: List[int]) -> List[int]:
        if any(n < 1 for n in value):
            raise ValueError("ladder entries must be positive")
        if value != sorted(value):
            raise ValueError("ladder must be sorted ascending")
        return value


class ReportRow(BaseModel):
    experiment: ExperimentId
    seed: int
    n: int
    p: float
    replicate: int
    values: Dict[str, Any] = {}


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class FitResult(BaseModel):
    slope: float
    stderr: float
    intercept: float
    r_squared: float
    mode: str = "power"


class Report(BaseModel):
    experiment: ExperimentId
    master_seed: int
    rows: List[ReportRow] = []
    summary: Dict[str, Any] = {}
    checks: List[CheckResult] = []
    warnings: List[str] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
