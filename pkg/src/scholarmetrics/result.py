"""Uniform tabular analysis result consumed by charts, CSV export and the
summarizer.

A row is ``(label, v1, ..., vk)`` where ``k == len(columns)``. Values are
ints, floats, or (for distribution-style results) lists of numbers. ``meta``
carries analysis mode, fallback notes and rendering hints; ``label_name``
names the label column in CSV/JSON output.
"""

import math
from dataclasses import dataclass, field


@dataclass
class AnalysisResult:
    kind: str
    columns: list
    rows: list
    label_name: str = "label"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns) + 1:
                raise ValueError(
                    f"row {row!r} has {len(row) - 1} values, expected {len(self.columns)}"
                )
            for v in row[1:]:
                _check_finite(v)

    @property
    def labels(self) -> list:
        return [row[0] for row in self.rows]

    def values(self, column: str) -> list:
        i = self.columns.index(column) + 1
        return [row[i] for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "type": "table",
            "kind": self.kind,
            "label_name": self.label_name,
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisResult":
        return cls(
            kind=d["kind"],
            columns=list(d["columns"]),
            rows=[tuple(_as_row_value(v) for v in row) for row in d["rows"]],
            label_name=d.get("label_name", "label"),
            meta=dict(d.get("meta", {})),
        )


def _as_row_value(v):
    return list(v) if isinstance(v, list) and not isinstance(v, str) else v


def _check_finite(v):
    if isinstance(v, (int, float)):
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r} in result row")
    elif isinstance(v, list):
        for x in v:
            _check_finite(x)
    else:
        raise ValueError(f"unsupported cell type {type(v).__name__}")


def format_cell(v) -> str:
    """Canonical text form of one cell. Floats use repr (shortest
    round-tripping form), lists join with ';'."""
    if isinstance(v, list):
        return ";".join(format_cell(x) for x in v)
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_cell(text: str):
    """Inverse of format_cell for numeric and list cells; other text stays
    a string."""
    if ";" in text:
        parts = text.split(";")
        try:
            return [parse_cell(p) for p in parts]
        except ValueError:
            return text
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text
