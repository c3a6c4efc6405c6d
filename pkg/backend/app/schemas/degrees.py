from pydantic import BaseModel, Field, field_validator
from typing import List, Optional


class ThetaSequence(BaseModel):
    """
    Limiting hub weights.

    `theta` holds the explicit head of the sequence. When `c_f` and `alpha` are set,
    indices past the head follow theta_i = c_f**alpha * i**(-alpha) up to the
    truncation `K`; otherwise the sequence is finite and K == len(theta).
    """
    theta: List[float]
    K: int = Field(..., ge=1)
    c_f: Optional[float] = Field(None, gt=0.0)
    alpha: Optional[float] = Field(None, gt=0.0, le=1.0)
    l2_norm_sq: float = Field(..., gt=0.0)
    tail_sq: float = Field(default=0.0, ge=0.0)
    mu: Optional[float] = Field(None, gt=0.0)

    @field_validator("theta")
    @classmethod
    def strictly_decreasing(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("theta must not be empty")
        for prev, cur in zip(value, value[1:]):
            if not cur < prev:
                raise ValueError("theta must be strictly decreasing")
        if value[-1] <= 0:
            raise ValueError("theta must be positive")
        return value

    @property
    def is_power_law(self) -> bool:
        return self.c_f is not None and self.alpha is not None


class AssumptionTolerances(BaseModel):
    hub_relative: float = Field(default=0.05, gt=0.0)
    mu_relative: float = Field(default=0.02, gt=0.0)
    tail: float = Field(default=0.5, gt=0.0)
    hub_count: int = Field(default=10, ge=1)


class TailStatistic(BaseModel):
    K: int
    value: float


class ValidationReport(BaseModel):
    n: int
    alpha: float
    hub_relative_deviation: float
    mu_empirical: float
    mu_oracle: Optional[float] = None
    mu_relative_error: Optional[float] = None
    tail_statistics: List[TailStatistic]
    hub_pass: bool
    mu_pass: bool
    tail_pass: bool

    @property
    def passed(self) -> bool:
        return self.hub_pass and self.mu_pass and self.tail_pass
