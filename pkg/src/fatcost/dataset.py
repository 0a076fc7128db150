"""Loading, validating and slicing Olympic-style cost tables.

A table is read from a CSV file with the exact header::

    name,year,season,country,events,athletes,outturn_cost_busd2015,overrun_pct_real

Empty cells mean "not available"; they never stand for zero, since a zero
overrun is a legitimate observation.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal

from .errors import DataError, EmptySampleError

HEADER = (
    "name",
    "year",
    "season",
    "country",
    "events",
    "athletes",
    "outturn_cost_busd2015",
    "overrun_pct_real",
)
SAMPLE_HEADER = ("value",)
SEASONS = ("summer", "winter")
Filter = Literal["all", "summer", "winter"]

# overruns above this many percent are legal but worth a second look
SUSPICIOUS_OVERRUN_PCT = 1000.0


@dataclass(frozen=True)
class GamesRecord:
    name: str
    year: int
    season: str
    country: str
    events: int | None = None
    athletes: int | None = None
    outturn_cost: float | None = None  # billions of 2015 USD
    overrun_pct: float | None = None  # percent, real terms

    @property
    def overrun_ratio(self) -> float | None:
        if self.overrun_pct is None:
            return None
        return 1.0 + self.overrun_pct / 100.0


@dataclass(frozen=True)
class GamesTable:
    records: tuple[GamesRecord, ...]
    provenance: str = ""

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def select(self, filter: Filter = "all") -> list[GamesRecord]:
        _check_filter(filter)
        return [r for r in self.records if filter == "all" or r.season == filter]


@dataclass(frozen=True)
class OverrunSample:
    """Overrun ratios (actual / estimated cost) with their record names."""

    ratios: tuple[float, ...]
    labels: tuple[str, ...]
    filter: str = "all"

    def __post_init__(self):
        if len(self.ratios) < 1:
            raise EmptySampleError("an overrun sample needs at least one ratio")
        if len(self.ratios) != len(self.labels):
            raise DataError("ratios and labels differ in length")
        if any(not (r > 0) for r in self.ratios):
            raise DataError("overrun ratios must be positive")

    def __len__(self):
        return len(self.ratios)

    def __iter__(self):
        return iter(self.ratios)

    def __array__(self, dtype=None, copy=None):
        import numpy as np

        return np.asarray(self.ratios, dtype=dtype or float)


@dataclass
class ValidationReport:
    errors: list[tuple[int, str]] = field(default_factory=list)
    warnings: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_for_errors(self):
        if self.errors:
            lines = [f"row {i}: {msg}" for i, msg in self.errors]
            raise DataError("invalid games table:\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class UnitCost:
    name: str
    year: int
    season: str
    cost_per_event: float  # millions of 2015 USD
    cost_per_athlete: float  # millions of 2015 USD


@dataclass(frozen=True)
class UnitCosts:
    rows: tuple[UnitCost, ...]
    skipped: tuple[tuple[str, str], ...]  # (name, reason)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def by_name(self) -> dict[str, UnitCost]:
        return {u.name: u for u in self.rows}


def _check_filter(filter):
    if filter not in ("all", *SEASONS):
        raise DataError(f"unknown filter {filter!r}; expected all, summer or winter")


def _parse_optional(text, row, column, kind):
    text = text.strip()
    if text == "":
        return None
    try:
        value = kind(text)
    except ValueError:
        raise DataError(f"row {row}, column {column!r}: cannot parse {text!r}") from None
    if kind is float and not math.isfinite(value):
        raise DataError(f"row {row}, column {column!r}: non-finite value {text!r}")
    return value


def _parse_rows(reader, provenance):
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != HEADER:
        raise DataError(f"{provenance}: header must be exactly {','.join(HEADER)}")
    records = []
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(HEADER):
            raise DataError(f"row {row_no}: expected {len(HEADER)} cells, got {len(row)}")
        name, year, season, country, events, athletes, cost, overrun = row
        year_value = _parse_optional(year, row_no, "year", int)
        if year_value is None:
            raise DataError(f"row {row_no}, column 'year': value required")
        records.append(
            GamesRecord(
                name=name.strip(),
                year=year_value,
                season=season.strip().lower(),
                country=country.strip(),
                events=_parse_optional(events, row_no, "events", int),
                athletes=_parse_optional(athletes, row_no, "athletes", int),
                outturn_cost=_parse_optional(cost, row_no, "outturn_cost_busd2015", float),
                overrun_pct=_parse_optional(overrun, row_no, "overrun_pct_real", float),
            )
        )
    return records


def _sort_key(record):
    season_rank = SEASONS.index(record.season) if record.season in SEASONS else len(SEASONS)
    return (record.year, season_rank)


def load_games_csv(path: str | Path, *, check: bool = True) -> GamesTable:
    """Read a games table.

    Raises :class:`DataError` on unparseable cells and, unless ``check`` is
    false, on any validation error (duplicate edition, bad season, ...).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not UTF-8 ({exc})") from None
    return loads_games_csv(text, provenance=path.name, check=check)


def loads_games_csv(text: str, provenance: str = "<string>", *, check: bool = True) -> GamesTable:
    records = _parse_rows(csv.reader(io.StringIO(text)), provenance)
    table = GamesTable(tuple(sorted(records, key=_sort_key)), provenance)
    if check:
        validate(table).raise_for_errors()
    return table


def load_bundled() -> GamesTable:
    """The Olympic Games 1960-2016 table shipped with the package."""
    text = resources.files("fatcost.data").joinpath("olympics.csv").read_text(encoding="utf-8")
    return loads_games_csv(text, provenance="olympics.csv")


def bundled_path() -> Path:
    return Path(str(resources.files("fatcost.data").joinpath("olympics.csv")))


def dumps_games_csv(table: GamesTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)

    def cell(v):
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)

    for r in table.records:
        writer.writerow(
            [r.name, r.year, r.season, r.country, cell(r.events), cell(r.athletes),
             cell(r.outturn_cost), cell(r.overrun_pct)]
        )
    return buf.getvalue()


def save_games_csv(table: GamesTable, path: str | Path) -> None:
    Path(path).write_text(dumps_games_csv(table), encoding="utf-8")


def validate(table: GamesTable) -> ValidationReport:
    """Check every record invariant; never raises."""
    report = ValidationReport()
    seen = {}
    for i, r in enumerate(table.records):
        if not r.name:
            report.errors.append((i, "name is empty"))
        if not (1896 <= r.year <= 2100):
            report.errors.append((i, f"year {r.year} outside [1896, 2100]"))
        if r.season not in SEASONS:
            report.errors.append((i, f"season {r.season!r} is not summer or winter"))
        key = (r.year, r.season)
        if key in seen:
            report.errors.append((i, f"duplicate edition {r.year} {r.season} (first at row {seen[key]})"))
        else:
            seen[key] = i
        for attr in ("events", "athletes"):
            v = getattr(r, attr)
            if v is not None and v <= 0:
                report.errors.append((i, f"{attr} must be positive, got {v}"))
        if r.outturn_cost is not None and not r.outturn_cost > 0:
            report.errors.append((i, f"outturn cost must be positive, got {r.outturn_cost}"))
        if r.overrun_pct is not None:
            if not r.overrun_pct > -100:
                report.errors.append((i, f"overrun {r.overrun_pct}% is not above -100%"))
            elif r.overrun_pct > SUSPICIOUS_OVERRUN_PCT:
                report.warnings.append((i, f"overrun {r.overrun_pct}% exceeds {SUSPICIOUS_OVERRUN_PCT:g}%"))
    return report


def overrun_ratios(table: GamesTable, filter: Filter = "all") -> OverrunSample:
    """Overrun ratios ``1 + pct/100`` for records that report an overrun."""
    selected = [r for r in table.select(filter) if r.overrun_pct is not None]
    if not selected:
        raise EmptySampleError(f"no overrun data for filter {filter!r}")
    return OverrunSample(
        ratios=tuple(r.overrun_ratio for r in selected),
        labels=tuple(r.name for r in selected),
        filter=filter,
    )


def costs(table: GamesTable, filter: Filter = "all") -> list[tuple[int, str, float]]:
    """(year, season, outturn cost) for records with a known cost."""
    return [(r.year, r.season, r.outturn_cost) for r in table.select(filter) if r.outturn_cost is not None]


def derive_unit_costs(table: GamesTable) -> UnitCosts:
    """Cost per event and per athlete in millions of 2015 USD.

    Records missing cost, events or athletes are skipped and listed in
    ``skipped``.
    """
    rows, skipped = [], []
    for r in table.records:
        missing = [a for a in ("outturn_cost", "events", "athletes") if getattr(r, a) is None]
        if missing:
            skipped.append((r.name, "missing " + ", ".join(missing)))
            continue
        millions = r.outturn_cost * 1000.0
        rows.append(UnitCost(r.name, r.year, r.season, millions / r.events, millions / r.athletes))
    return UnitCosts(tuple(rows), tuple(skipped))


def load_sample_csv(path: str | Path) -> OverrunSample:
    """Read a bare sample: a ``value`` header then one positive number per row."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    if not lines or tuple(c.strip() for c in lines[0].split(",")) != SAMPLE_HEADER:
        raise DataError(f"{path}: header must be exactly 'value'")
    values = []
    for row_no, line in enumerate(lines[1:], start=2):
        if line.strip():
            values.append(_parse_optional(line, row_no, "value", float))
    if not values:
        raise EmptySampleError(f"{path}: no values")
    return OverrunSample(tuple(values), tuple(f"#{i + 1}" for i in range(len(values))))


def sniff_header(path: str | Path) -> tuple[str, ...]:
    try:
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    return tuple(c.strip() for c in first.strip().split(","))


def as_array(sample: OverrunSample | Iterable[float]):
    """Coerce a sample or any iterable of reals to a 1-d float array."""
    import numpy as np

    if isinstance(sample, OverrunSample):
        return np.asarray(sample.ratios, dtype=float)
    return np.asarray(list(sample) if not hasattr(sample, "__len__") else sample, dtype=float).ravel()
