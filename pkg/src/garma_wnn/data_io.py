"""Loading, transforming and splitting price series.

All numeric routines work on the plain value array; timestamps are carried
along only so that outputs can be labelled.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Optional, Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class TimeSeries:
    """Regularly spaced observations starting at ``start`` (UTC)."""

    start: datetime
    step: timedelta
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DataError("a TimeSeries needs a non-empty 1-D value array")
        if self.step <= timedelta(0):
            raise DataError("time step must be positive")
        if not np.all(np.isfinite(values)):
            raise DataError("TimeSeries values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def timestamps(self) -> list[datetime]:
        return [self.start + i * self.step for i in range(len(self))]

    def slice(self, lo: int, hi: int) -> "TimeSeries":
        return TimeSeries(self.start + lo * self.step, self.step, self.values[lo:hi])


@dataclass(frozen=True)
class NormParams:
    y_min: float
    y_max: float

    def __post_init__(self):
        if not self.y_max > self.y_min:
            raise DataError(f"invalid normalization range [{self.y_min}, {self.y_max}]")


@dataclass(frozen=True)
class SplitSpec:
    """Lengths of the initialization, training and testing segments."""

    init_len: int
    train_len: int
    test_len: int

    @property
    def total(self) -> int:
        return self.init_len + self.train_len + self.test_len


def _parse_timestamp(text: str) -> datetime:
    ts = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def load_series(
    path: str | os.PathLike,
    timestamp_col: str = "timestamp",
    value_col: str = "price",
    fill: Optional[str] = None,
    require_positive: bool = False,
) -> TimeSeries:
    """Read a delimiter-separated file into a regular :class:`TimeSeries`.

    Rows are sorted by timestamp. The grid must be strictly regular; with
    ``fill="interpolate"`` an isolated single missing step is linearly
    interpolated, anything wider is still an error.

    Raises
    ------
    DataError
        Missing file or column, unparseable row (1-based data row number
        in the message), duplicate or missing timestamps, or a non-positive
        value when ``require_positive`` is set.
    """
    if fill not in (None, "none", "interpolate"):
        raise DataError(f"unknown fill policy {fill!r}")
    if not os.path.isfile(path):
        raise DataError(f"input file not found: {path}")

    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for col in (timestamp_col, value_col):
            if col not in fields:
                raise DataError(f"column {col!r} not in header {fields}")
        for row_no, row in enumerate(reader, start=1):
            try:
                ts = _parse_timestamp(row[timestamp_col])
                val = float(row[value_col])
            except (TypeError, ValueError) as exc:
                raise DataError(
                    f"row {row_no} (line {row_no + 1}): cannot parse "
                    f"{row.get(timestamp_col)!r}, {row.get(value_col)!r}: {exc}"
                ) from None
            if not np.isfinite(val):
                raise DataError(f"row {row_no} (line {row_no + 1}): non-finite value {val}")
            records.append((ts, val, row_no))

    if not records:
        raise DataError(f"no data rows in {path}")
    records.sort(key=lambda r: r[0])

    stamps = [r[0] for r in records]
    values = [r[1] for r in records]
    if len(stamps) == 1:
        step = timedelta(hours=1)
    else:
        diffs = [b - a for a, b in zip(stamps, stamps[1:])]
        dups = sorted({stamps[i + 1].isoformat() for i, d in enumerate(diffs) if d == timedelta(0)})
        if dups:
            raise DataError(f"duplicate timestamps: {', '.join(dups)}")
        step = min(diffs)

        out_vals = [values[0]]
        missing, interpolated = [], []
        for i, d in enumerate(diffs):
            n_steps, rem = divmod(d, step)
            if rem:
                raise DataError(
                    f"irregular spacing between {stamps[i].isoformat()} and "
                    f"{stamps[i + 1].isoformat()}"
                )
            if n_steps == 2 and fill == "interpolate":
                out_vals.append(0.5 * (values[i] + values[i + 1]))
                interpolated.append(stamps[i] + step)
            elif n_steps > 1:
                missing.extend(stamps[i] + k * step for k in range(1, n_steps))
            out_vals.append(values[i + 1])
        if missing:
            shown = ", ".join(m.isoformat() for m in missing[:20])
            more = f" (+{len(missing) - 20} more)" if len(missing) > 20 else ""
            raise DataError(f"gap in time grid; missing timestamps: {shown}{more}")
        values = out_vals

    arr = np.asarray(values, dtype=float)
    if require_positive and np.any(arr <= 0):
        bad = int(np.argmax(arr <= 0))
        raise DataError(
            f"non-positive price {arr[bad]} at {(stamps[0] + bad * step).isoformat()}; "
            "log transform undefined"
        )
    return TimeSeries(stamps[0], step, arr)


def log_returns(series: TimeSeries) -> TimeSeries:
    """``R_t = ln P_{t+1} - ln P_t``; one element shorter than the input."""
    vals = series.values
    if vals.size < 2:
        raise DataError("log returns need at least two observations")
    if np.any(vals <= 0):
        raise DataError("log returns undefined for non-positive values")
    return TimeSeries(series.start + series.step, series.step, np.diff(np.log(vals)))


def minmax_normalize(values: Sequence[float], params: Optional[NormParams] = None):
    """Affine map onto [0, 1]; returns ``(normalized, params)``.

    When ``params`` is given (e.g. training statistics reused on test data)
    they are applied as-is and the output may fall outside [0, 1].
    """
    y = np.asarray(values, dtype=float)
    if params is None:
        if y.size < 2:
            raise DataError("normalization needs at least two values")
        lo, hi = float(np.min(y)), float(np.max(y))
        if not hi > lo:
            raise DataError("degenerate (constant) series cannot be normalized")
        params = NormParams(lo, hi)
    return (y - params.y_min) / (params.y_max - params.y_min), params


def minmax_denormalize(normalized: Sequence[float], params: NormParams) -> np.ndarray:
    z = np.asarray(normalized, dtype=float)
    return params.y_min + z * (params.y_max - params.y_min)


def split(series: TimeSeries, spec: SplitSpec):
    """Contiguous (init, train, test) partition of ``series``."""
    lengths = (spec.init_len, spec.train_len, spec.test_len)
    if any(n <= 0 for n in lengths):
        raise DataError(f"every split segment must be non-empty, got {lengths}")
    if spec.total != len(series):
        raise DataError(f"split lengths sum to {spec.total}, series has {len(series)}")
    a = spec.init_len
    b = a + spec.train_len
    return series.slice(0, a), series.slice(a, b), series.slice(b, len(series))


def write_series_csv(path, series: TimeSeries, value_col: str = "price") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", value_col])
        for ts, v in zip(series.timestamps(), series.values):
            w.writerow([ts.isoformat(), repr(float(v))])
