"""Monthly fraud-report time series: CSV ingestion, pooling across
provinces, and synthetic observation sets for recovery experiments.

CSV contract (both loading and export): header `month,province,reports`,
months as YYYY-MM, province an arbitrary comma-free token, reports a
nonnegative decimal; UTF-8, LF line endings.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateError, GapError, GridMismatch, ParseError
from .model import Parameters, State
from .observe import MONTH_DAYS, PREVALENCE, month_times, simulate_observable

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def _parse_month(token: str) -> datetime.date:
    m = _MONTH_RE.match(token)
    if not m:
        raise ValueError(f"bad month {token!r}, expected YYYY-MM")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise ValueError(f"bad month number in {token!r}")
    return datetime.date(year, month, 1)


def _next_month(d: datetime.date) -> datetime.date:
    if d.month == 12:
        return datetime.date(d.year + 1, 1, 1)
    return datetime.date(d.year, d.month + 1, 1)


def month_str(d: datetime.date) -> str:
    return f"{d.year:04d}-{d.month:02d}"


@dataclass(frozen=True)
class ReportSeries:
    """Contiguous monthly counts for one province (or the pooled total)."""

    month_starts: tuple[datetime.date, ...]
    counts: np.ndarray
    label: str

    def __post_init__(self):
        if len(self.month_starts) != len(self.counts):
            raise ValueError("months and counts must have equal length")
        for prev, cur in zip(self.month_starts, self.month_starts[1:]):
            if cur != _next_month(prev):
                raise GapError(month_str(_next_month(prev)))
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be nonnegative")

    def __len__(self) -> int:
        return len(self.counts)

    def times(self) -> np.ndarray:
        """ODE-clock times of the month starts (k * 30.44 days)."""
        return month_times(len(self))


def load_reports(path, scale: float = 1.0) -> list[ReportSeries]:
    """Parse a report CSV into one series per province, sorted by name.

    `scale` multiplies all counts (optional report-to-victim conversion).
    """
    per_province: dict[str, dict[datetime.date, float]] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != "month,province,reports":
            raise ParseError(1, f"bad header {header!r}")
        for line_no, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != 3:
                raise ParseError(line_no, f"expected 3 fields, got {len(cells)}")
            try:
                month = _parse_month(cells[0])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from exc
            province = cells[1]
            if not province:
                raise ParseError(line_no, "empty province")
            try:
                count = float(cells[2])
            except ValueError as exc:
                raise ParseError(line_no, f"bad count {cells[2]!r}") from exc
            if count < 0:
                raise ParseError(line_no, "negative count")
            rows = per_province.setdefault(province, {})
            if month in rows:
                raise DuplicateError(month_str(month), province)
            rows[month] = count * scale
    out = []
    for province in sorted(per_province):
        rows = per_province[province]
        months = sorted(rows)
        series = ReportSeries(month_starts=tuple(months),
                              counts=np.array([rows[m] for m in months]),
                              label=province)
        out.append(series)
    return out


def export_series(series: ReportSeries, path) -> None:
    """Write a series back out under the CSV contract (full precision)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("month,province,reports\n")
        for month, count in zip(series.month_starts, series.counts):
            fh.write(f"{month_str(month)},{series.label},{count:.17g}\n")


def pool(series: list[ReportSeries]) -> ReportSeries:
    """Monthwise sum across provinces sharing an identical month grid."""
    if not series:
        raise ValueError("nothing to pool")
    grid = series[0].month_starts
    for s in series[1:]:
        if s.month_starts != grid:
            raise GridMismatch(f"{s.label} does not share the month grid")
    total = np.sum([s.counts for s in series], axis=0)
    return ReportSeries(month_starts=grid, counts=total, label="pooled")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a deterministic synthetic observation set."""

    true_params: Parameters
    init: State
    months: int
    noise_sd: float = 0.0
    seed: int = 0
    observable: str = PREVALENCE
    start_month: datetime.date = datetime.date(2021, 1, 1)
    label: str = "synthetic"

    def __post_init__(self):
        if self.months < 2:
            raise ValueError("need at least 2 months")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be nonnegative")


def generate_synthetic(spec: SyntheticSpec) -> ReportSeries:
    """Simulate, sample the observable monthly, add truncated Gaussian noise."""
    values = simulate_observable(spec.true_params, spec.init,
                                 month_times(spec.months), spec.observable)
    if spec.noise_sd > 0:
        rng = np.random.default_rng(spec.seed)
        values = values + rng.normal(0.0, spec.noise_sd, size=len(values))
    values = np.maximum(values, 0.0)
    months = [spec.start_month]
    for _ in range(spec.months - 1):
        months.append(_next_month(months[-1]))
    return ReportSeries(month_starts=tuple(months), counts=values,
                        label=spec.label)
