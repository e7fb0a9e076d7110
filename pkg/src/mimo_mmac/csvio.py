"""CSV emission: ``#`` metadata lines, a header, rows, optional ``#`` trailer."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    footer: list[str] = field(default_factory=list)
    rate_columns: tuple[str, ...] = ()

    def to_bits(self) -> "Table":
        idx = [self.header.index(c) for c in self.rate_columns]
        rows = []
        for row in self.rows:
            row = list(row)
            for i in idx:
                if isinstance(row[i], float):
                    row[i] = row[i] / math.log(2)
            rows.append(row)
        meta = dict(self.metadata, units="bits")
        return Table(self.header, rows, meta, self.footer, self.rate_columns)

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def render(self) -> str:
        out = io.StringIO()
        for key, value in self.metadata.items():
            out.write(f"# {key}: {fmt(value)}\n")
        out.write(",".join(self.header) + "\n")
        for row in self.rows:
            out.write(",".join(fmt(v) for v in row) + "\n")
        for line in self.footer:
            out.write(f"# {line}\n")
        return out.getvalue()


def read_table(text: str) -> tuple[dict, list[str], list[list[str]]]:
    """Parse rendered CSV back into (metadata, header, rows of strings)."""
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            if header is None and ": " in line:
                key, _, value = line[2:].partition(": ")
                meta[key] = value
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, header or [], rows
