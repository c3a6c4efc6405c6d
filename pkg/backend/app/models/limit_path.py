from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
import pandas as pd

from app.schemas.limit import Excursion


@dataclass(frozen=True)
class LimitPath:
    """
    Piecewise-affine path: sum of positive jumps at `jump_times` plus `slope * t`.

    Only clocks that fired before `horizon` are stored. `clock_index` holds the
    1-based hub index of each jump.
    """
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    clock_index: np.ndarray
    horizon: float
    K: int
    tail_sq: float
    slope: float = -1.0
    compensated: bool = False

    @cached_property
    def cumulative(self) -> np.ndarray:
        """cumulative[k] = sum of the first k jumps"""
        out = np.zeros(self.jump_sizes.size + 1)
        np.cumsum(self.jump_sizes, out=out[1:])
        return out

    @property
    def num_jumps(self) -> int:
        return int(self.jump_times.size)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.jump_times, t, side="right")
        return self.cumulative[k] + self.slope * t

    @cached_property
    def pre_jump_values(self) -> np.ndarray:
        return self.cumulative[:-1] + self.slope * self.jump_times

    @cached_property
    def post_jump_values(self) -> np.ndarray:
        return self.cumulative[1:] + self.slope * self.jump_times

    def total_variation(self) -> float:
        return float(self.jump_sizes.sum() + abs(self.slope) * self.horizon)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"jump_time": self.jump_times, "jump_size": self.jump_sizes})


class ExcursionTable:
    """
    Excursions above the past minimum, sorted by length descending
    (earlier start first on equal lengths).

    Segment arrays describe the reflected path between consecutive jumps inside
    each excursion: it starts at `seg_h0` at `seg_t0` and falls linearly to
    `seg_h1` at `seg_t1`. `seg_owner` maps a segment to its row in this table.
    """

    def __init__(
        self,
        l: np.ndarray,
        r: np.ndarray,
        area: np.ndarray,
        open_flag: np.ndarray,
        seg_t0: np.ndarray,
        seg_t1: np.ndarray,
        seg_h0: np.ndarray,
        seg_h1: np.ndarray,
        seg_owner: np.ndarray,
        marks: Optional[np.ndarray] = None,
    ):
        self.l = l
        self.r = r
        self.length = r - l
        self.area = area
        self.open_flag = open_flag
        self.seg_t0 = seg_t0
        self.seg_t1 = seg_t1
        self.seg_h0 = seg_h0
        self.seg_h1 = seg_h1
        self.seg_owner = seg_owner
        self.marks = marks

    def __repr__(self):
        return f"<ExcursionTable(count={len(self)}, marked={self.marks is not None})>"

    def __len__(self) -> int:
        return int(self.l.size)

    def __getitem__(self, i: int) -> Excursion:
        return Excursion(
            l=float(self.l[i]),
            r=float(self.r[i]),
            length=float(self.length[i]),
            area=float(self.area[i]),
            marks=None if self.marks is None else int(self.marks[i]),
            open_flag=bool(self.open_flag[i]),
        )

    def __iter__(self) -> Iterator[Excursion]:
        for i in range(len(self)):
            yield self[i]

    @property
    def closed(self) -> np.ndarray:
        return ~self.open_flag

    def with_marks(self, marks: np.ndarray) -> "ExcursionTable":
        return ExcursionTable(
            self.l, self.r, self.area, self.open_flag,
            self.seg_t0, self.seg_t1, self.seg_h0, self.seg_h1, self.seg_owner,
            marks=np.asarray(marks, dtype=np.int64),
        )

    def to_frame(self) -> pd.DataFrame:
        marks = self.marks if self.marks is not None else np.full(len(self), -1)
        return pd.DataFrame(
            {
                "l": self.l,
                "r": self.r,
                "length": self.length,
                "area": self.area,
                "marks": marks,
                "open_flag": self.open_flag.astype(np.int64),
            }
        )


class ReflectedPath:
    """Evaluator of path(t) - min_{u <= t} path(u), exact at any t"""

    def __init__(self, path: LimitPath):
        self.path = path
        # prefix_min[k] = min(0, pre-jump values of the first k jumps)
        prefix = np.minimum.accumulate(np.concatenate([[0.0], path.pre_jump_values]))
        self.prefix_min = prefix

    def __repr__(self):
        return f"<ReflectedPath(jumps={self.path.num_jumps}, horizon={self.path.horizon})>"

    def running_min(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.path.jump_times, t, side="right")
        return np.minimum(self.prefix_min[k], self.path.value(t))

    def __call__(self, t):
        return self.path.value(t) - self.running_min(t)
