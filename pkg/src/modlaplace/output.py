"""Tables of results and their CSV / JSON renderings.

A :class:`Table` holds raw cells (``mpf``, :class:`Measured`, ``int``,
``Fraction``, ``str`` or ``None``); formatting happens only on output so the
same table can be written either way.  Numbers are printed with as many
significant digits as their tracked error allows, in fixed notation for
``1e-4 <= |v| < 1e6`` and as ``dE±x`` otherwise.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Optional, Sequence

import mpmath
from mpmath import mp, mpf

# digits held back from the working precision when no error is tracked
UNTRACKED_GUARD = 10
FIXED_RANGE = (mpf("1e-4"), mpf("1e6"))


@dataclass(frozen=True)
class Measured:
    """A value with an absolute error bound; printed to the digits it supports."""

    value: mpf
    error: mpf


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)

    def add(self, *cells: Any) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} cells, got {len(cells)}")
        self.rows.append(list(cells))

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def max_digits() -> int:
    return max(mp.dps - UNTRACKED_GUARD, 1)


def significant_digits(value: mpf, error: Optional[mpf]) -> int:
    cap = max_digits()
    if error is None or error == 0 or value == 0:
        return cap
    digits = int(mpmath.floor(mpmath.log10(abs(value) / abs(error))))
    return min(max(digits, 1), cap)


def format_number(value: mpf, digits: int) -> str:
    if value == 0:
        return "0"
    rounded = mpmath.mpf(mpmath.nstr(value, digits))
    lo, hi = FIXED_RANGE
    if lo <= abs(rounded) < hi:
        return mpmath.nstr(value, digits, strip_zeros=False,
                           min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    text = mpmath.nstr(value, digits, strip_zeros=False,
                       min_fixed=mpmath.inf, max_fixed=-mpmath.inf)
    mantissa, exponent = text.split("e")
    sign = "-" if exponent.startswith("-") else "+"
    return f"{mantissa}E{sign}{exponent.lstrip('+-')}"


def _finite_decimal(q: Fraction) -> Optional[str]:
    # exact decimal expansion when the denominator is 2^a 5^b
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    places = max(twos, fives)
    scaled = abs(q.numerator) * 10 ** places // q.denominator
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if q < 0 else ""
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def format_cell(cell: Any) -> Optional[str]:
    """Text of one cell; ``None`` stays ``None`` (empty in CSV, null in JSON)."""
    if cell is None:
        return None
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, int):
        return str(cell)
    if isinstance(cell, str):
        return cell
    if isinstance(cell, Fraction):
        exact = _finite_decimal(cell)
        if exact is not None and len(exact) <= max_digits() + 2:
            return exact
        return format_number(mpmath.mpf(cell.numerator) / cell.denominator, max_digits())
    if isinstance(cell, Measured):
        value = mpmath.mpf(cell.value)
        return format_number(value, significant_digits(value, mpmath.mpf(cell.error)))
    if isinstance(cell, (mpf, float)):
        return format_number(mpmath.mpf(cell), max_digits())
    raise TypeError(f"cannot format {type(cell).__name__}")


def timestamp_line() -> str:
    now = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    from . import __version__

    return f"# generated {now} by modlaplace {__version__}"


def to_csv(tables: Sequence[Table], timestamp: bool = True) -> str:
    """CSV text; several tables are separated by a blank line and a ``# name`` line."""
    buf = io.StringIO()
    if timestamp:
        buf.write(timestamp_line() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for i, table in enumerate(tables):
        if len(tables) > 1:
            if i:
                buf.write("\n")
            buf.write(f"# {table.name}\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow(["" if c is None else c for c in map(format_cell, row)])
    return buf.getvalue()


def to_json(tables: Sequence[Table], timestamp: bool = True) -> str:
    """JSON object ``{"tables": {name: {column: [cells...]}}}``; numbers as strings."""
    doc: dict[str, Any] = {}
    if timestamp:
        doc["generated"] = timestamp_line()[len("# generated "):]
    doc["tables"] = {
        t.name: {col: [format_cell(row[j]) for row in t.rows] for j, col in enumerate(t.columns)}
        for t in tables
    }
    return json.dumps(doc, indent=2) + "\n"


def read_csv_tables(text: str) -> dict[str, list[dict[str, str]]]:
    """Parse output of :func:`to_csv` back into rows keyed by column name."""
    tables: dict[str, list[dict[str, str]]] = {}
    name = "table"
    block: list[str] = []

    def flush() -> None:
        if block:
            tables[name] = list(csv.DictReader(block))

    for line in text.splitlines():
        if line.startswith("# generated"):
            continue
        if line.startswith("# "):
            flush()
            name, block = line[2:], []
        elif line == "":
            flush()
            block = []
        else:
            block.append(line)
    flush()
    return tables
