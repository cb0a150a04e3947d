"""Shared data model: series tensors, station graphs, calendars, windows.

Values are validated on construction and frozen (arrays are marked
read-only), so instances are safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SeriesTensor",
    "StationGraph",
    "CalendarFrame",
    "WindowedSample",
    "split_dataset",
    "make_windows",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SeriesTensor:
    """Charging data of shape (T, N, C): hours x stations x channels.

    Channel 0 is the forecast target (hourly volume in kWh, or occupancy
    as a fraction in [0, 1]).
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.ndim != 3:
            raise ValueError(f"series must have shape (T, N, C), got {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"all series dimensions must be >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series contains non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def C(self) -> int:
        return self.values.shape[2]

    def slice_time(self, start: int, stop: int) -> "SeriesTensor":
        return SeriesTensor(self.values[start:stop])


@dataclass(frozen=True)
class StationGraph:
    """Station identifiers plus a symmetric {0,1} adjacency with unit diagonal."""

    node_ids: tuple
    adjacency: np.ndarray

    def __post_init__(self):
        ids = tuple(str(i) for i in self.node_ids)
        adj = _frozen_array(self.adjacency)
        n = len(ids)
        if adj.shape != (n, n):
            raise ValueError(f"adjacency must be ({n}, {n}), got {adj.shape}")
        if not np.all((adj == 0.0) | (adj == 1.0)):
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if not np.all(np.diag(adj) == 1.0):
            raise ValueError("adjacency diagonal must be all ones (self-loops)")
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "adjacency", adj)

    @property
    def N(self) -> int:
        return len(self.node_ids)


@dataclass(frozen=True)
class CalendarFrame:
    """Hourly timestamps with derived hour-of-day, day-of-week, holiday flags.

    Timestamps must be strictly increasing with a constant one-hour stride.
    Day-of-week uses the Monday=0 convention.
    """

    timestamps: np.ndarray
    holiday_flag: np.ndarray = None
    hour_of_day: np.ndarray = field(init=False)
    day_of_week: np.ndarray = field(init=False)

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[h]")
        ts = _frozen_array(ts, dtype="datetime64[h]")
        if ts.ndim != 1 or ts.size < 1:
            raise ValueError("timestamps must be a non-empty 1-D sequence")
        if ts.size > 1:
            strides = np.diff(ts.astype("int64"))
            bad = np.nonzero(strides != 1)[0]
            if bad.size:
                i = int(bad[0])
                raise ValueError(
                    f"timestamps must advance by exactly one hour; row {i + 1} "
                    f"({ts[i + 1]}) follows {ts[i]}"
                )
        hours_since_epoch = ts.astype("int64")
        hour = _frozen_array(hours_since_epoch % 24, dtype=np.int64)
        days = ts.astype("datetime64[D]").astype("int64")
        dow = _frozen_array((days + 3) % 7, dtype=np.int64)
        if self.holiday_flag is None:
            flags = np.zeros(ts.size, dtype=np.int64)
        else:
            flags = np.asarray(self.holiday_flag, dtype=np.int64)
        if flags.shape != ts.shape or not np.all((flags == 0) | (flags == 1)):
            raise ValueError("holiday_flag must be a {0,1} array aligned with timestamps")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "hour_of_day", hour)
        object.__setattr__(self, "day_of_week", dow)
        object.__setattr__(self, "holiday_flag", _frozen_array(flags, dtype=np.int64))

    @property
    def T(self) -> int:
        return self.timestamps.size

    def slice_time(self, start: int, stop: int) -> "CalendarFrame":
        return CalendarFrame(self.timestamps[start:stop], self.holiday_flag[start:stop])


@dataclass(frozen=True)
class WindowedSample:
    """One training sample: P history steps, S target steps, history calendar.

    The target starts one step after the history ends; both are contiguous
    views into the source tensor.
    """

    history: np.ndarray
    target: np.ndarray
    hour_of_day: np.ndarray
    day_of_week: np.ndarray
    holiday_flag: np.ndarray

    @property
    def anchor_hour(self) -> int:
        """Hour of the final history step, the forecast anchor."""
        return int(self.hour_of_day[-1])

    @property
    def anchor_dow(self) -> int:
        return int(self.day_of_week[-1])


def split_dataset(series: SeriesTensor, ratios, min_len: int = 1):
    """Split chronologically into (train, valid, test).

    Validation and test lengths are floor(T * ratio); the flooring
    remainder goes to the training split. Raises if the ratios do not sum
    to 1 or any split ends up shorter than ``min_len`` steps.
    """
    r = [float(x) for x in ratios]
    if len(r) != 3 or any(x <= 0 for x in r):
        raise ValueError(f"need three positive ratios, got {ratios}")
    if abs(sum(r) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1 within 1e-9, got sum {sum(r)!r}")
    total = series.T
    n_valid = int(np.floor(total * r[1]))
    n_test = int(np.floor(total * r[2]))
    n_train = total - n_valid - n_test
    for name, n in (("train", n_train), ("valid", n_valid), ("test", n_test)):
        if n < min_len:
            raise ValueError(
                f"{name} split has {n} steps, fewer than the required {min_len}"
            )
    train = series.slice_time(0, n_train)
    valid = series.slice_time(n_train, n_train + n_valid)
    test = series.slice_time(n_train + n_valid, total)
    return train, valid, test


def make_windows(series: SeriesTensor, calendar: CalendarFrame, P: int, S: int):
    """Enumerate all stride-1 windows of P history and S target steps.

    Returns exactly T - P - S + 1 samples ordered by start time. History
    and target are read-only views into the series (no copies).
    """
    if P < 1 or S < 1:
        raise ValueError(f"P and S must be >= 1, got P={P}, S={S}")
    if calendar.T != series.T:
        raise ValueError(
            f"calendar length {calendar.T} does not match series length {series.T}"
        )
    total = series.T
    if total < P + S:
        raise ValueError(f"series length {total} is shorter than P+S={P + S}")
    vals = series.values
    samples = []
    for i in range(total - P - S + 1):
        samples.append(
            WindowedSample(
                history=vals[i : i + P],
                target=vals[i + P : i + P + S, :, 0:1],
                hour_of_day=calendar.hour_of_day[i : i + P],
                day_of_week=calendar.day_of_week[i : i + P],
                holiday_flag=calendar.holiday_flag[i : i + P],
            )
        )
    return samples
