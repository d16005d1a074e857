"""
Point-cloud ingestion from CSV.

Layout: one header row, one row per point. The designated attribute column
holds A(x); every other column is a numeric feature, kept in header order.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from hotmapper.core.types import PointCloud


class PointCloudLoadError(ValueError):
    """The CSV cannot be read as a point cloud."""


class MissingColumnError(PointCloudLoadError):
    def __init__(self, column: str, path: str | os.PathLike):
        super().__init__(f"column {column!r} not found in header of {path}")
        self.column = column


class NonNumericCellError(PointCloudLoadError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: {value!r} is not a number")
        self.row = row
        self.column = column


class RaggedRowError(PointCloudLoadError):
    def __init__(self, row: int, found: int, expected: int):
        super().__init__(f"row {row} has {found} cells; header has {expected}")
        self.row = row


def load_point_cloud_csv(path: str | os.PathLike, attribute_column: str) -> PointCloud:
    """Rows are numbered from 1 for the first data row in error messages."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Point cloud CSV not found: {path}")

    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise PointCloudLoadError(f"{path} is empty; a header row is required")
        header = [name.strip() for name in header]
        if attribute_column not in header:
            raise MissingColumnError(attribute_column, path)
        target = header.index(attribute_column)
        if len(header) < 2:
            raise PointCloudLoadError(f"{path} has no feature columns besides {attribute_column!r}")

        rows: list[list[float]] = []
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedRowError(row_number, len(row), len(header))
            values = []
            for column, cell in zip(header, row, strict=True):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise NonNumericCellError(row_number, column, cell) from None
            rows.append(values)

    if not rows:
        raise PointCloudLoadError(f"{path} has a header but no data rows")

    table = np.asarray(rows, dtype=float)
    features = [j for j in range(len(header)) if j != target]
    return PointCloud(
        points=table[:, features],
        attribute=table[:, target],
        feature_names=tuple(header[j] for j in features),
    )


def export_point_cloud_csv(
    cloud: PointCloud, path: str | os.PathLike, attribute_column: str = "attribute"
) -> None:
    names = list(cloud.feature_names or (f"f{j}" for j in range(cloud.dim)))
    if attribute_column in names:
        raise PointCloudLoadError(f"attribute column {attribute_column!r} clashes with a feature name")
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([*names, attribute_column])
        for coords, value in zip(cloud.points.tolist(), cloud.attribute.tolist(), strict=True):
            writer.writerow([repr(x) for x in coords] + [repr(value)])
