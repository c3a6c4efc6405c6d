from pydantic import BaseModel, Field
from typing import List, Tuple


class ComponentRecord(BaseModel):
    size: int = Field(..., ge=0)
    edges: int = Field(..., ge=0)
    surplus: int = Field(..., ge=0)
    diameter: int = Field(default=0, ge=0)
    exact: bool = True
    contains_hubs: List[int] = []


class ZVector(BaseModel):
    entries: List[Tuple[float, int]] = []
    complete: bool = True

    def __len__(self) -> int:
        return len(self.entries)


class SampledPath(BaseModel):
    times: List[float]
    values: List[float]
    truncated: bool = False
