"""Temperature-logger CSV files: parsing, canonical emission, profile conversion.

File layout, one tag per file::

    tag_id,timestamp,temperature_c
    TIVE-001,2024-05-01T08:00:00Z,4.85

Timestamps are ISO 8601 and must be UTC (``Z`` or ``+00:00``). Any row that
fails a check fails the whole file; nothing is dropped silently.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from freshroute.errors import DomainError
from freshroute.kinetics import TemperatureProfile

HEADER = ("tag_id", "timestamp", "temperature_c")
SANITY_BAND = (-60.0, 80.0)


class SensorFormatError(ValueError):
    """The file does not follow the logger CSV layout."""


class SensorDataError(ValueError):
    """A row is well formed but violates a data invariant."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SensorLog:
    tag_id: str
    records: tuple[tuple[datetime, float], ...]
    source_file: str = ""

    def __len__(self) -> int:
        return len(self.records)

    @property
    def timestamps(self) -> list[datetime]:
        return [r[0] for r in self.records]

    @property
    def temperatures(self) -> list[float]:
        return [r[1] for r in self.records]


def _parse_timestamp(text: str, line: int) -> datetime:
    raw = text.strip()
    try:
        ts = datetime.fromisoformat(raw[:-1] + "+00:00" if raw.endswith("Z") else raw)
    except ValueError:
        raise SensorFormatError(f"line {line}: bad ISO-8601 timestamp {text!r}") from None
    if ts.tzinfo is None or ts.utcoffset() != timedelta(0):
        raise SensorDataError(f"timestamp {text!r} is not UTC", line)
    return ts.astimezone(timezone.utc)


def parse_sensor_csv(content: str, source_file: str = "") -> SensorLog:
    if not content or not content.strip():
        raise SensorFormatError("empty sensor file")
    reader = csv.reader(io.StringIO(content))
    header = next(reader)
    if tuple(header) != HEADER:
        raise SensorFormatError(f"header must be {','.join(HEADER)!r}, got {','.join(header)!r}")
    lo, hi = SANITY_BAND
    tag = None
    records = []
    for line, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise SensorFormatError(f"line {line}: expected 3 fields, got {len(row)}")
        row_tag, ts_text, temp_text = (c.strip() for c in row)
        if tag is None:
            tag = row_tag
        elif row_tag != tag:
            raise SensorDataError(f"tag {row_tag!r} differs from {tag!r}; one tag per file", line)
        ts = _parse_timestamp(ts_text, line)
        try:
            temp = float(temp_text)
        except ValueError:
            raise SensorFormatError(f"line {line}: bad temperature {temp_text!r}") from None
        if not lo <= temp <= hi:
            raise SensorDataError(f"temperature {temp} outside sanity band [{lo}, {hi}]", line)
        if records and ts <= records[-1][0]:
            raise SensorDataError("timestamps must be strictly increasing", line)
        records.append((ts, temp))
    if not records:
        raise SensorFormatError("no data rows")
    return SensorLog(tag, tuple(records), source_file)


def load_sensor_csv(path: str | Path) -> SensorLog:
    path = Path(path)
    return parse_sensor_csv(path.read_text(encoding="utf-8"), str(path))


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    spec = "microseconds" if ts.microsecond else "seconds"
    return ts.replace(tzinfo=None).isoformat(timespec=spec) + "Z"


def emit_sensor_csv(log: SensorLog) -> str:
    """Canonical text: LF line endings, temperatures with two decimals."""
    lines = [",".join(HEADER)]
    lines += [f"{log.tag_id},{format_timestamp(ts)},{temp:.2f}" for ts, temp in log.records]
    return "\n".join(lines) + "\n"


def log_to_profile(log: SensorLog, trip_start: datetime | None = None) -> TemperatureProfile:
    """Hours since ``trip_start`` (default: first record) against temperature."""
    if not log.records:
        raise DomainError("empty sensor log")
    first = log.records[0][0]
    if trip_start is None:
        trip_start = first
    if trip_start.tzinfo is None:
        raise DomainError("trip_start must be timezone-aware UTC")
    if trip_start > first:
        raise DomainError("trip_start is after the first record")
    times = tuple((ts - trip_start).total_seconds() / 3600.0 for ts, _ in log.records)
    return TemperatureProfile(times, tuple(t for _, t in log.records))


def synthetic_sensor_log(tag_id: str, start: datetime, count: int, seed: int = 0,
                         interval_minutes: float = 15.0, base_temperature: float = 5.0,
                         noise_std: float = 0.8) -> SensorLog:
    """Random-walk logger trace rounded to the canonical two decimals."""
    rng = np.random.default_rng(seed)
    temps = base_temperature + np.cumsum(rng.normal(0.0, noise_std / 4, count)) + rng.normal(0.0, noise_std / 4, count)
    step = timedelta(minutes=interval_minutes)
    records = tuple((start + i * step, round(float(t), 2)) for i, t in enumerate(temps))
    return SensorLog(tag_id, records)
