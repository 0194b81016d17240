"""Typed tabular datasets and CSV I/O."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, ParseError

DISCRETE_MAX_LEVELS = 20


@dataclass(frozen=True)
class ColumnKind:
    """``CONTINUOUS`` or ``ColumnKind.discrete(cardinality)``."""

    cardinality: int | None = None

    def __post_init__(self):
        if self.cardinality is not None and self.cardinality < 2:
            raise InputError(f"discrete cardinality must be >= 2, got {self.cardinality}")

    @classmethod
    def discrete(cls, cardinality: int) -> "ColumnKind":
        return cls(int(cardinality))

    @property
    def is_discrete(self) -> bool:
        return self.cardinality is not None

    def __repr__(self) -> str:
        return "CONTINUOUS" if self.cardinality is None else f"DISCRETE({self.cardinality})"


CONTINUOUS = ColumnKind()


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x p`` numeric table with named, typed columns.

    ``values`` is stored as a read-only float64 array.
    """

    names: tuple[str, ...]
    kinds: tuple[ColumnKind, ...]
    values: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        kinds = tuple(self.kinds)
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise InputError("values must be a 2-d table")
        n, p = values.shape
        if n < 1 or p < 1:
            raise InputError(f"dataset must have n >= 1 and p >= 1, got {n}x{p}")
        if len(names) != p or len(kinds) != p:
            raise InputError("names/kinds length does not match the number of columns")
        if len(set(names)) != p:
            raise InputError("column names must be unique")
        if not np.all(np.isfinite(values)):
            raise InputError("dataset contains missing or non-finite values")
        for j, kind in enumerate(kinds):
            if kind.is_discrete:
                col = values[:, j]
                if np.any(col != np.round(col)) or col.min() < 0 or col.max() >= kind.cardinality:
                    raise InputError(
                        f"column {names[j]!r}: discrete values must be integers in "
                        f"[0, {kind.cardinality})"
                    )
        values.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "values", values)

    @classmethod
    def continuous(cls, names: Sequence[str], values) -> "Dataset":
        return cls(tuple(names), (CONTINUOUS,) * len(names), values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def kind(self, name: str) -> ColumnKind:
        return self.kinds[self.index(name)]

    @property
    def all_continuous(self) -> bool:
        return not any(k.is_discrete for k in self.kinds)

    @property
    def all_discrete(self) -> bool:
        return all(k.is_discrete for k in self.kinds)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.names == other.names
            and self.kinds == other.kinds
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, columns={list(zip(self.names, self.kinds))})"


def _infer_kind(tokens: list[str], values: np.ndarray) -> ColumnKind:
    try:
        ints = [int(t) for t in tokens]
    except ValueError:
        return CONTINUOUS
    if min(ints) < 0 or len(set(ints)) > DISCRETE_MAX_LEVELS:
        return CONTINUOUS
    return ColumnKind.discrete(max(2, max(ints) + 1))


def read_csv(text: str, kind_hints: Mapping[str, ColumnKind] | None = None,
             source: str | None = None) -> Dataset:
    """Parse CSV text into a :class:`Dataset`.

    Row numbers in errors are file line numbers (the header is line 1).
    A column is inferred DISCRETE when every cell is an integer literal,
    all values are non-negative and there are at most 20 distinct values;
    its cardinality is ``max + 1``.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise InputError(f"{source or 'csv'}: empty file")
    header = [h.strip() for h in rows[0]]
    if not all(header):
        raise ParseError("empty column name in header", 1, source)
    p = len(header)
    body = rows[1:]
    if not body:
        raise InputError(f"{source or 'csv'}: no data rows")
    values = np.empty((len(body), p))
    tokens: list[list[str]] = [[] for _ in range(p)]
    for r, row in enumerate(body):
        line = r + 2
        if len(row) != p:
            raise ParseError(f"expected {p} fields, found {len(row)}", line, source)
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell == "" or cell.lower() in ("na", "nan", "null"):
                raise InputError(
                    f"{source or 'csv'}: missing value at row {line}, column {header[j]!r}"
                )
            try:
                values[r, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"non-numeric value {cell!r} in column {header[j]!r}", line, source
                ) from None
            tokens[j].append(cell)
    hints = dict(kind_hints or {})
    unknown = set(hints) - set(header)
    if unknown:
        raise InputError(f"kind hints for unknown columns {sorted(unknown)}")
    kinds = tuple(hints.get(h) or _infer_kind(tokens[j], values[:, j]) for j, h in enumerate(header))
    return Dataset(tuple(header), kinds, values)


def load_csv(path, kind_hints: Mapping[str, ColumnKind] | None = None) -> Dataset:
    path = Path(path)
    return read_csv(path.read_text(encoding="utf-8"), kind_hints, source=str(path))


def format_csv(ds: Dataset) -> str:
    """CSV text for ``ds``; continuous cells use ``repr`` so they round-trip."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ds.names)
    discrete = [k.is_discrete for k in ds.kinds]
    for row in ds.values:
        writer.writerow(
            [str(int(v)) if d else repr(float(v)) for v, d in zip(row, discrete)]
        )
    return buf.getvalue()


def write_csv(ds: Dataset, path) -> None:
    Path(path).write_text(format_csv(ds), encoding="utf-8")


def standardize(ds: Dataset) -> Dataset:
    """Zero-mean, unit sample variance continuous columns; constants become 0."""
    values = np.array(ds.values, copy=True)
    for j, kind in enumerate(ds.kinds):
        if kind.is_discrete:
            continue
        col = values[:, j]
        centered = col - col.mean()
        sd = centered.std(ddof=1) if ds.n > 1 else 0.0
        if not np.isfinite(sd) or sd <= 1e-12 * max(1.0, np.abs(col).max()):
            values[:, j] = 0.0
        else:
            values[:, j] = centered / sd
    return Dataset(ds.names, ds.kinds, values)


def select_columns(ds: Dataset, names: Sequence[str]) -> Dataset:
    idx = [ds.index(name) for name in names]
    if len(set(idx)) != len(idx):
        raise InputError("duplicate column in selection")
    return Dataset(tuple(names), tuple(ds.kinds[i] for i in idx), ds.values[:, idx])


def as_continuous(ds: Dataset) -> Dataset:
    """Same values with every column marked CONTINUOUS."""
    return Dataset(ds.names, (CONTINUOUS,) * ds.p, ds.values)
