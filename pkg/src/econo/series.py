"""Quarterly series data model, CSV ingestion and deterministic transforms."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np


class SeriesError(ValueError):
    """Invalid series operation or malformed input data."""


# Month abbreviations (Spanish) that may label a quarter; both the quarter-start
# and the quarter-end month are accepted.
_MONTH_TO_QUARTER = {
    "ene": 1, "feb": 1, "mar": 1,
    "abr": 2, "may": 2, "jun": 2,
    "jul": 3, "ago": 3, "sep": 3, "set": 3,
    "oct": 4, "nov": 4, "dic": 4,
}
_QUARTER_START_OR_END = {"ene", "mar", "abr", "jun", "jul", "sep", "set", "oct", "dic"}

_RE_Q = re.compile(r"^\s*(\d{4})\s*[Qq]\s*([1-4])\s*$")
_RE_MONTH = re.compile(r"^\s*([A-Za-z]{3})\.?\s*(\d{4})\s*$")


@dataclass(frozen=True, order=True)
class QuarterPeriod:
    year: int
    quarter: int

    def __post_init__(self):
        if self.quarter not in (1, 2, 3, 4):
            raise SeriesError(f"quarter must be in 1..4, got {self.quarter}")

    @classmethod
    def parse(cls, text: str) -> "QuarterPeriod":
        """Parse ``2008Q1`` or ``mar.2008`` style period labels."""
        m = _RE_Q.match(text)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        m = _RE_MONTH.match(text)
        if m:
            mon = m.group(1).lower()
            if mon in _QUARTER_START_OR_END:
                return cls(int(m.group(2)), _MONTH_TO_QUARTER[mon])
        raise SeriesError(f"unrecognised period label {text!r}")

    @property
    def ordinal(self) -> int:
        return self.year * 4 + self.quarter - 1

    @classmethod
    def from_ordinal(cls, n: int) -> "QuarterPeriod":
        return cls(n // 4, n % 4 + 1)

    def shift(self, n: int) -> "QuarterPeriod":
        return QuarterPeriod.from_ordinal(self.ordinal + n)

    def __sub__(self, other: "QuarterPeriod") -> int:
        return self.ordinal - other.ordinal

    def __str__(self) -> str:
        return f"{self.year}Q{self.quarter}"


@dataclass(frozen=True)
class PeriodSpan:
    """Closed range of quarters ``first..last``."""

    first: QuarterPeriod
    last: QuarterPeriod

    def __post_init__(self):
        if self.last < self.first:
            raise SeriesError(f"empty span {self.first}..{self.last}")

    @classmethod
    def parse(cls, text: str) -> "PeriodSpan":
        parts = text.replace("..", " ").split()
        if len(parts) != 2:
            raise SeriesError(f"sample span must be 'FIRST LAST', got {text!r}")
        return cls(QuarterPeriod.parse(parts[0]), QuarterPeriod.parse(parts[1]))

    def __len__(self) -> int:
        return self.last - self.first + 1

    def __contains__(self, p: QuarterPeriod) -> bool:
        return self.first <= p <= self.last

    def __iter__(self) -> Iterator[QuarterPeriod]:
        return (self.first.shift(i) for i in range(len(self)))

    def __str__(self) -> str:
        return f"{self.first} {self.last}"


@dataclass(frozen=True, eq=False)
class QuarterlySeries:
    """Contiguous quarterly values.

    ``consumed`` counts the leading observations lost to lags or differences
    relative to the raw data this series was derived from.
    """

    name: str
    start: QuarterPeriod
    values: np.ndarray
    consumed: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise SeriesError(f"series {self.name!r} must be a non-empty 1-d sequence")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> QuarterPeriod:
        return self.start.shift(len(self) - 1)

    @property
    def span(self) -> PeriodSpan:
        return PeriodSpan(self.start, self.end)

    def __getitem__(self, period: QuarterPeriod) -> float:
        i = period - self.start
        if not 0 <= i < len(self):
            raise KeyError(f"{period} outside {self.name} range {self.span}")
        return float(self.values[i])

    def window(self, span: PeriodSpan) -> np.ndarray:
        """Values over ``span``; the span must lie inside the series range."""
        i = span.first - self.start
        j = span.last - self.start + 1
        if i < 0 or j > len(self):
            raise SeriesError(f"{self.name}: {span} not inside {self.span}")
        return self.values[i:j]

    def renamed(self, name: str) -> "QuarterlySeries":
        return QuarterlySeries(name, self.start, self.values, self.consumed)

    def periods(self) -> list[QuarterPeriod]:
        return list(self.span)


class Dataset(Mapping[str, QuarterlySeries]):
    """Named series with case-insensitive lookup.

    Raw series all share one range; derived series added with :meth:`with_series`
    may start later.
    """

    def __init__(self, series: Iterable[QuarterlySeries], range_: PeriodSpan | None = None):
        self._series: dict[str, QuarterlySeries] = {}
        for s in series:
            key = s.name.upper()
            if key in self._series:
                raise SeriesError(f"duplicate series name {s.name!r}")
            self._series[key] = s
        if range_ is None and self._series:
            first = min(s.start for s in self._series.values())
            last = max(s.end for s in self._series.values())
            range_ = PeriodSpan(first, last)
        self.range = range_

    def __getitem__(self, name: str) -> QuarterlySeries:
        try:
            return self._series[name.upper()]
        except KeyError:
            raise KeyError(name) from None

    def __iter__(self):
        return (s.name for s in self._series.values())

    def __len__(self) -> int:
        return len(self._series)

    def __contains__(self, name) -> bool:
        return isinstance(name, str) and name.upper() in self._series

    def with_series(self, s: QuarterlySeries, overwrite: bool = False) -> "Dataset":
        if s.name in self and not overwrite:
            raise SeriesError(f"series {s.name!r} already exists")
        kept = [v for v in self._series.values() if v.name.upper() != s.name.upper()]
        return Dataset(kept + [s], self.range)


# ---------------------------------------------------------------- numbers

_RE_COMMA_DEC = re.compile(r"^[+-]?(\d{1,3}(\.\d{3})+|\d+)(,\d*)?([eE][+-]?\d+)?$")
_RE_POINT_DEC = re.compile(r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d*)?([eE][+-]?\d+)?$|^[+-]?\.\d+([eE][+-]?\d+)?$")

LOCALES = ("comma-decimal", "point-decimal")


def parse_number(text: str, locale: str) -> float:
    """Parse a numeric cell; ``"24.088,41"`` is 24088.41 under comma-decimal."""
    s = text.strip()
    if locale == "comma-decimal":
        if not _RE_COMMA_DEC.match(s):
            raise ValueError(f"not a comma-decimal number: {text!r}")
        return float(s.replace(".", "").replace(",", "."))
    if locale == "point-decimal":
        if not _RE_POINT_DEC.match(s):
            raise ValueError(f"not a point-decimal number: {text!r}")
        return float(s.replace(",", ""))
    raise ValueError(f"unknown numeric locale {locale!r}")


def format_number(x: float, locale: str) -> str:
    """Shortest round-tripping text for ``x`` (no thousands grouping)."""
    s = repr(float(x))
    if locale == "comma-decimal":
        return s.replace(".", ",")
    if locale == "point-decimal":
        return s
    raise ValueError(f"unknown numeric locale {locale!r}")


def load_dataset(path: str | Path, numeric_locale: str = "point-decimal",
                 delimiter: str | None = None) -> Dataset:
    """Read a period-first CSV file into a :class:`Dataset`.

    The delimiter defaults to ``;`` for comma-decimal files and ``,`` otherwise.
    """
    if numeric_locale not in LOCALES:
        raise SeriesError(f"unknown numeric locale {numeric_locale!r}")
    if delimiter is None:
        delimiter = ";" if numeric_locale == "comma-decimal" else ","
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise SeriesError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    names = header[1:]
    if not names:
        raise SeriesError(f"{path}: no series columns")
    seen = set()
    for n in names:
        if n.upper() in seen:
            raise SeriesError(f"{path}: duplicate series name {n!r}")
        seen.add(n.upper())

    periods = []
    cols: list[list[float]] = [[] for _ in names]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SeriesError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            p = QuarterPeriod.parse(row[0])
        except SeriesError as exc:
            raise SeriesError(f"{path}:{lineno}: {exc}") from None
        if periods and p - periods[-1] != 1:
            raise SeriesError(f"{path}:{lineno}: period {p} does not follow {periods[-1]}")
        periods.append(p)
        for j, cell in enumerate(row[1:]):
            try:
                cols[j].append(parse_number(cell, numeric_locale))
            except ValueError:
                raise SeriesError(
                    f"{path}: malformed number {cell!r} at row {lineno}, column {names[j]!r}"
                ) from None
    span = PeriodSpan(periods[0], periods[-1])
    return Dataset([QuarterlySeries(n, periods[0], c) for n, c in zip(names, cols)], span)


# ---------------------------------------------------------------- transforms

def diff(s: QuarterlySeries, order: int = 1) -> QuarterlySeries:
    if order < 1:
        raise SeriesError("difference order must be positive")
    if len(s) <= order:
        raise SeriesError(f"{s.name}: {len(s)} observations, cannot difference {order} times")
    v = np.diff(s.values, n=order)
    name = s.name
    for _ in range(order):
        name = f"D({name})"
    return QuarterlySeries(name, s.start.shift(order), v, s.consumed + order)


def lag(s: QuarterlySeries, k: int) -> QuarterlySeries:
    """Series whose value at t is ``s(t-k)``, restricted to where that exists.

    Only the original end date is kept, so the result is ``k`` shorter.
    """
    if k < 0:
        raise SeriesError("lag must be non-negative")
    if k == 0:
        return s
    if len(s) <= k:
        raise SeriesError(f"{s.name}: {len(s)} observations, cannot lag by {k}")
    return QuarterlySeries(f"{s.name}(-{k})", s.start.shift(k), s.values[:-k], s.consumed + k)


def step_dummy(range_: PeriodSpan, break_at: QuarterPeriod, name: str = "D") -> QuarterlySeries:
    """0 before ``break_at``, 1 from ``break_at`` on."""
    if break_at not in range_:
        raise SeriesError(f"break {break_at} outside {range_}")
    v = np.zeros(len(range_))
    v[break_at - range_.first:] = 1.0
    return QuarterlySeries(name, range_.first, v)


def fisher_weights(L: int) -> np.ndarray:
    return np.arange(L + 1, 0, -1, dtype=float)


def fisher_z(s: QuarterlySeries, L: int = 7, name: str | None = None) -> QuarterlySeries:
    """Arithmetic-lag aggregate ``sum_i (L+1-i) * x[t-i]`` for i = 0..L."""
    if L < 0:
        raise SeriesError("L must be non-negative")
    if len(s) <= L:
        raise SeriesError(f"{s.name}: {len(s)} observations, need more than {L}")
    w = fisher_weights(L)
    # valid convolution: out[t] = sum_i w[i] * x[t + L - i]
    v = np.convolve(s.values, w, mode="valid")
    return QuarterlySeries(name or f"Z{s.name}", s.start.shift(L), v, s.consumed + L)


def common_span(series: Iterable[QuarterlySeries]) -> PeriodSpan:
    items = list(series)
    first = max(s.start for s in items)
    last = min(s.end for s in items)
    if last < first:
        raise SeriesError("series do not overlap")
    return PeriodSpan(first, last)
