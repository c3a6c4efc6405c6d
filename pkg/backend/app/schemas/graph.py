from pydantic import BaseModel
from typing import Dict, Optional


class DiagnosticsReport(BaseModel):
    p: float
    degenerate: bool
    retained_total: int
    nu_tilde: Optional[float] = None
    nu_ratio: Optional[float] = None  # nu_tilde / (p * nu_n)
    hub_ratios: Dict[int, Optional[float]] = {}  # 1-based vertex -> d~_i / (p d_i)
    total_ratio: Optional[float] = None  # l~_n / (p l_n)
    tail_statistic: Optional[float] = None  # sum_{i>K} d~(d~-1) / l~_n
    square_sum_ratio: Optional[float] = None  # sum d~^2 / l~_n


class SandwichCounts(BaseModel):
    epsilon: float
    lower: int
    middle: int
    upper: int

    @property
    def ordered(self) -> bool:
        return self.lower <= self.middle <= self.upper
