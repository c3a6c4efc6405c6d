from enum import Enum
from typing import Optional, Sequence
from pathlib import Path
import logging

import numpy as np

from app.core.exceptions import DegenerateInputError, ParameterError, ParityError

logger = logging.getLogger(__name__)


class CaseTag(str, Enum):
    QUANTILE_I = "QuantileI"
    IID_II = "IidII"
    USER_SUPPLIED = "UserSupplied"


class DegreeSequence:
    """Non-increasing degree sequence with even total and power-law provenance"""

    def __init__(
        self,
        d: Sequence[int],
        case_tag: CaseTag = CaseTag.USER_SUPPLIED,
        tau: Optional[float] = None,
        c_f: Optional[float] = None,
        seed: Optional[int] = None,
        gammas: Optional[np.ndarray] = None,
    ):
        arr = np.array(d, dtype=np.int64).reshape(-1)
        if arr.size == 0:
            raise ParameterError("degree sequence must have at least one vertex")
        if np.any(arr < 0):
            raise ParameterError("degrees must be non-negative")
        if np.any(np.diff(arr) > 0):
            raise ParameterError("degrees must be sorted non-increasing")
        if arr[0] < 1:
            raise DegenerateInputError("degree sequence has no positive degree")
        if int(arr.sum()) % 2 != 0:
            raise ParityError(f"total degree {int(arr.sum())} is odd")
        arr.flags.writeable = False
        self.d = arr
        self.case_tag = CaseTag(case_tag)
        self.tau = tau
        self.c_f = c_f
        self.seed = seed
        self.gammas = gammas

    def __repr__(self):
        return f"<DegreeSequence(n={self.n}, total={self.total}, case='{self.case_tag.value}')>"

    def __len__(self) -> int:
        return int(self.d.size)

    @property
    def n(self) -> int:
        return int(self.d.size)

    @property
    def total(self) -> int:
        """ell_n, the number of half-edges"""
        return int(self.d.sum())

    @property
    def mu(self) -> float:
        """Empirical mean degree ell_n / n"""
        return self.total / self.n

    @property
    def alpha(self) -> Optional[float]:
        return None if self.tau is None else 1.0 / (self.tau - 1.0)

    def to_text(self) -> str:
        """One integer per line behind a header carrying the provenance"""
        header = (
            f"# n={self.n} tau={self._fmt(self.tau)} c_f={self._fmt(self.c_f)} "
            f"case={self.case_tag.value} seed={self._fmt(self.seed)}"
        )
        body = "\n".join(str(int(x)) for x in self.d)
        return f"{header}\n{body}\n"

    @classmethod
    def from_text(cls, text: str) -> "DegreeSequence":
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        meta = {}
        if lines and lines[0].startswith("#"):
            for token in lines[0][1:].split():
                key, _, value = token.partition("=")
                meta[key] = value
            lines = lines[1:]
        degrees = [int(line) for line in lines]
        n_declared = meta.get("n")
        if n_declared not in (None, "none") and int(n_declared) != len(degrees):
            raise ParameterError(f"header declares n={n_declared} but {len(degrees)} degrees follow")
        return cls(
            degrees,
            case_tag=CaseTag(meta.get("case", CaseTag.USER_SUPPLIED.value)),
            tau=cls._parse(meta.get("tau"), float),
            c_f=cls._parse(meta.get("c_f"), float),
            seed=cls._parse(meta.get("seed"), int),
        )

    def save(self, path: str) -> None:
        Path(path).write_text(self.to_text())
        logger.info(f"Wrote {self.n} degrees to {path}")

    @classmethod
    def load(cls, path: str) -> "DegreeSequence":
        return cls.from_text(Path(path).read_text())

    @staticmethod
    def _fmt(value) -> str:
        return "none" if value is None else repr(value)

    @staticmethod
    def _parse(value, kind):
        if value is None or value == "none":
            return None
        return kind(value)
