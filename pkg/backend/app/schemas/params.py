from pydantic import BaseModel, Field


class ModelParams(BaseModel):
    tau: float = Field(..., gt=2.0, lt=3.0)
    lam: float = Field(default=1.0, gt=0.0)  # critical-window location lambda
    c_f: float = Field(default=1.0, gt=0.0)
    n: int = Field(..., ge=1)
    seed: int = 0


class Exponents(BaseModel):
    alpha: float = Field(..., gt=0.5, lt=1.0)
    rho: float = Field(..., gt=0.0, lt=0.5)
    eta: float = Field(..., gt=0.0, lt=1.0)
