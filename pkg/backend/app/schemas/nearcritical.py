from enum import Enum
from pydantic import BaseModel
from typing import List, Optional


class Regime(str, Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


class PredictedValue(BaseModel):
    label: str
    value: float


class RegimePrediction(BaseModel):
    regime: Regime
    p_n: float
    predicted: List[PredictedValue]
    warnings: List[str] = []

    def value(self, label: str) -> float:
        for item in self.predicted:
            if item.label == label:
                return item.value
        raise KeyError(label)


class HubStatistics(BaseModel):
    i: int
    j: int
    replicates: int
    mean_edges: float
    same_component_frequency: float
    predicted_edges: Optional[float] = None
