"""Datasets, feature landscapes, CSV ingestion and seeded splits."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Raised when a dataset cannot be ingested or split."""


@dataclass(frozen=True)
class FeatureLandscape:
    """Feature counts of an input space.

    Attributes:
        ell: number of real-valued features.
        omega_counts: category count of each ordinal feature.
        nu_counts: category count of each nominal feature.
    """

    ell: int = 0
    omega_counts: tuple[int, ...] = ()
    nu_counts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_counts", tuple(int(o) for o in self.omega_counts))
        object.__setattr__(self, "nu_counts", tuple(int(n) for n in self.nu_counts))
        if self.ell < 0:
            raise ValueError("ell must be nonnegative")
        if any(o < 1 for o in self.omega_counts) or any(n < 1 for n in self.nu_counts):
            raise ValueError("category counts must be at least 1")

    @property
    def omega(self) -> int:
        return len(self.omega_counts)

    @property
    def nu(self) -> int:
        return len(self.nu_counts)

    @property
    def n_features(self) -> int:
        return self.ell + self.omega + self.nu

    def conjugate(self) -> tuple[int, ...]:
        """Entry C-1 counts the ordinal features with at least C+1 categories."""
        top = max(self.omega_counts, default=1)
        return tuple(sum(1 for o in self.omega_counts if o - 1 >= c) for c in range(1, top))

    def key(self) -> tuple:
        """Order-insensitive digest; bounds do not depend on feature order."""
        return (self.ell, tuple(sorted(self.omega_counts)), tuple(sorted(self.nu_counts)))

    def __le__(self, other: "FeatureLandscape") -> bool:
        return (
            self.ell <= other.ell
            and self.omega == other.omega
            and self.nu == other.nu
            and all(a <= b for a, b in zip(self.omega_counts, other.omega_counts))
            and all(a <= b for a, b in zip(self.nu_counts, other.nu_counts))
        )


@dataclass(frozen=True)
class Example:
    reals: tuple[float, ...] = ()
    ordinals: tuple[int, ...] = ()
    nominals: tuple[int, ...] = ()
    label: int | None = None


@dataclass(frozen=True)
class Dataset:
    landscape: FeatureLandscape
    examples: tuple[Example, ...]
    n_classes: int
    class_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "examples", tuple(self.examples))
        ls = self.landscape
        for row, ex in enumerate(self.examples):
            if len(ex.reals) != ls.ell or len(ex.ordinals) != ls.omega or len(ex.nominals) != ls.nu:
                raise DataError(f"example {row} does not match the landscape")
            for j, (v, k) in enumerate(zip(ex.ordinals, ls.omega_counts)):
                if not 1 <= v <= k:
                    raise DataError(f"example {row}: ordinal feature {j} value {v} outside 1..{k}")
            for j, (v, k) in enumerate(zip(ex.nominals, ls.nu_counts)):
                if not 1 <= v <= k:
                    raise DataError(f"example {row}: nominal feature {j} value {v} outside 1..{k}")
            if ex.label is not None and not 1 <= ex.label <= self.n_classes:
                raise DataError(f"example {row}: label {ex.label} outside 1..{self.n_classes}")

    def __len__(self) -> int:
        return len(self.examples)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(self.landscape, tuple(self.examples[i] for i in indices), self.n_classes, self.class_names)

    def labels(self) -> list[int]:
        return [ex.label for ex in self.examples]


_SPEC = re.compile(r"^\s*(real|label|(ord|nom)\((\d+)\))\s*$")


def _parse_schema(schema: str) -> list[tuple[str, int]]:
    columns = []
    for i, token in enumerate(schema.split(",")):
        match = _SPEC.match(token)
        if not match:
            raise DataError(f"column {i}: unknown column spec {token.strip()!r}")
        if match.group(2):
            k = int(match.group(3))
            if k < 1:
                raise DataError(f"column {i}: category count must be at least 1")
            columns.append((match.group(2), k))
        else:
            columns.append((match.group(1), 0))
    if sum(1 for kind, _ in columns if kind == "label") != 1:
        raise DataError("schema must declare exactly one label column")
    return columns


def _label_order(tokens: set[str]) -> list[str]:
    try:
        return sorted(tokens, key=float)
    except ValueError:
        return sorted(tokens)


def load_dataset(path: str | Path, schema: str | None = None) -> Dataset:
    """Read a CSV whose first line is the column schema.

    Args:
        path: CSV file. The first line lists ``real``, ``ord(K)``, ``nom(K)``
            or ``label`` for each column.
        schema: optional replacement for the header line (the header is still
            consumed).

    Categorical cells must be integers in ``1..K``. Labels may be any token and
    are relabeled ``1..n`` in sorted order.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise DataError(f"{path}: empty file")
    columns = _parse_schema(schema if schema is not None else ",".join(rows[0]))
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    label_col = next(i for i, (kind, _) in enumerate(columns) if kind == "label")

    raw_labels = set()
    for r, row in enumerate(body, start=2):
        if len(row) != len(columns):
            raise DataError(f"row {r}: expected {len(columns)} columns, got {len(row)}")
        if not row[label_col].strip():
            raise DataError(f"row {r}, column {label_col}: missing label")
        raw_labels.add(row[label_col].strip())
    names = _label_order(raw_labels)
    label_of = {name: i + 1 for i, name in enumerate(names)}

    examples = []
    for r, row in enumerate(body, start=2):
        reals, ords, noms = [], [], []
        for col, ((kind, k), cell) in enumerate(zip(columns, row)):
            cell = cell.strip()
            if kind == "label":
                continue
            if kind == "real":
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(f"row {r}, column {col}: non-numeric real {cell!r}") from None
                if not math.isfinite(value):
                    raise DataError(f"row {r}, column {col}: non-finite real {cell!r}")
                reals.append(value)
                continue
            try:
                value = int(cell)
            except ValueError:
                raise DataError(f"row {r}, column {col}: unknown category {cell!r}") from None
            if not 1 <= value <= k:
                raise DataError(f"row {r}, column {col}: category {value} outside 1..{k}")
            (ords if kind == "ord" else noms).append(value)
        examples.append(Example(tuple(reals), tuple(ords), tuple(noms), label_of[row[label_col].strip()]))

    landscape = FeatureLandscape(
        ell=sum(1 for kind, _ in columns if kind == "real"),
        omega_counts=tuple(k for kind, k in columns if kind == "ord"),
        nu_counts=tuple(k for kind, k in columns if kind == "nom"),
    )
    return Dataset(landscape, tuple(examples), max(len(names), 1), tuple(names))


def bundled_dataset_path(name: str = "iris") -> Path:
    """Path to a CSV shipped with the package."""
    return Path(str(resources.files("treebounds") / "datasets" / f"{name}.csv"))


def load_bundled(name: str = "iris") -> Dataset:
    return load_dataset(bundled_dataset_path(name))


def shuffled_indices(m: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of ``range(m)`` drawn from a PCG64 stream."""
    return [int(i) for i in np.random.Generator(np.random.PCG64(seed)).permutation(m)]


def split_count(d: Dataset, n_first: int, seed: int) -> tuple[Dataset, Dataset]:
    """Shuffle under ``seed`` and cut after ``n_first`` examples."""
    if len(d) == 0:
        raise DataError("cannot split an empty dataset")
    order = shuffled_indices(len(d), seed)
    return d.subset(order[:n_first]), d.subset(order[n_first:])


def split_dataset(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform split; the first part gets ceil(fraction * m) examples."""
    if not 0 < train_fraction < 1:
        raise DataError("train_fraction must lie strictly between 0 and 1")
    if len(d) == 0:
        raise DataError("cannot split an empty dataset")
    # rounding guards against 0.85 * 100 = 85.00000000000001
    n_train = math.ceil(round(train_fraction * len(d), 9))
    return split_count(d, n_train, seed)


def empirical_landscape(d: Dataset) -> FeatureLandscape:
    """Landscape whose categorical counts are the distinct values observed in ``d``."""
    ls = d.landscape
    ords = tuple(max(1, len({ex.ordinals[j] for ex in d.examples})) for j in range(ls.omega))
    noms = tuple(max(1, len({ex.nominals[j] for ex in d.examples})) for j in range(ls.nu))
    return FeatureLandscape(ls.ell, ords, noms)


def shrink_landscape(ls: FeatureLandscape, k: int) -> FeatureLandscape:
    """Clamp every categorical count at ``k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return FeatureLandscape(
        ls.ell,
        tuple(min(o, k) for o in ls.omega_counts),
        tuple(min(n, k) for n in ls.nu_counts),
    )
