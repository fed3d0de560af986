"""Report objects and their text / CSV / JSON renderings.

Text output follows the layout of the usual econometrics-package tables:
7 significant digits for magnitudes of at least one, 6 decimals below one,
4 decimals for probabilities, integers up to 8 digits and "2.41E+09" style
beyond, all rounded half-even.  CSV and JSON keep full double precision.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np

FORMATS = ("text", "csv", "json")
CELL_KINDS = ("num", "prob", "int", "text", "paren", "bracket")


# ------------------------------------------------------------- formatting

def _dec(x: float) -> Decimal:
    return Decimal(repr(float(x)))


def format_number(x) -> str:
    if x is None:
        return "NA"
    x = float(x)
    if math.isnan(x):
        return "NA"
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    ax = abs(x)
    if ax >= 1e8:
        mant, exp = f"{x:.2E}".split("E")
        return f"{mant}E{exp[0]}{int(exp[1:]):02d}"
    if ax >= 1e7:
        # 8 integer digits still fit the column
        return str(_dec(x).quantize(Decimal(1), rounding=ROUND_HALF_EVEN))
    if ax >= 1:
        d = _dec(x)
        digits = 7 - (d.adjusted() + 1)
        q = d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN) if digits > 0 \
            else d.quantize(Decimal(1), rounding=ROUND_HALF_EVEN)
        # rounding may carry into an extra digit (9999999.5 -> 10000000)
        if q.adjusted() > d.adjusted() and digits > 0:
            q = q.quantize(Decimal(1).scaleb(-(digits - 1)), rounding=ROUND_HALF_EVEN)
        s = format(q, "f")
        if q.adjusted() + 1 > 7:
            return s            # carried into the 8-digit integer form
        return s if "." in s else s + "."
    q = _dec(x).quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN)
    s = format(q, "f")
    return "0.000000" if s == "-0.000000" else s


def format_prob(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return format(_dec(x).quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN), "f")


def format_short(x) -> str:
    """6 significant digits at or above one, 5 decimals below (standard errors, t-stats)."""
    x = float(x)
    if not math.isfinite(x):
        return "NA"
    d = _dec(x)
    if abs(x) >= 1:
        digits = max(6 - (d.adjusted() + 1), 0)
    else:
        digits = 5
    return format(d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN), "f")


def format_cell(value, kind: str) -> str:
    if value is None:
        return ""
    if kind == "text" or isinstance(value, str):
        return str(value)
    if kind == "paren":
        return f"({format_short(value)})"
    if kind == "bracket":
        return f"[{format_short(value)}]"
    if kind == "int":
        return str(int(value))
    if kind == "prob":
        return format_prob(value)
    return format_number(value)


# ---------------------------------------------------------------- model

@dataclass
class Table:
    """Row label column followed by typed value columns."""

    title: str | None
    columns: list                       # header labels for the value columns
    kinds: list                         # one of CELL_KINDS per value column
    rows: list = field(default_factory=list)   # [label, v1, v2, ...]
    label_header: str = ""
    notes: list = field(default_factory=list)
    row_kinds: dict = field(default_factory=dict)   # row index -> kind for all its cells
    marks: list = field(default_factory=list)       # [row, column] pairs printed with "*"

    def __post_init__(self):
        if len(self.columns) != len(self.kinds):
            raise ValueError("one kind per column")
        bad = [k for k in list(self.kinds) + list(self.row_kinds.values()) if k not in CELL_KINDS]
        if bad:
            raise ValueError(f"unknown cell kinds {bad}")
        self.row_kinds = {int(k): v for k, v in self.row_kinds.items()}

    def add(self, label, *values, kind: str | None = None):
        if len(values) != len(self.columns):
            raise ValueError(f"row {label!r} has {len(values)} cells for {len(self.columns)} columns")
        if kind is not None:
            if kind not in CELL_KINDS:
                raise ValueError(f"unknown cell kind {kind!r}")
            self.row_kinds[len(self.rows)] = kind
        self.rows.append([label, *(_plain(v) for v in values)])
        return self

    def mark(self, row: int, column: int):
        self.marks.append([row, column])
        return self

    def kind_of(self, row: int, column: int) -> str:
        return self.row_kinds.get(row, self.kinds[column])


@dataclass
class Report:
    title: str
    meta: list = field(default_factory=list)     # header lines
    tables: list = field(default_factory=list)
    footer: list = field(default_factory=list)

    def extend(self, other: "Report") -> "Report":
        self.tables.append(Table(other.title, [], [], notes=list(other.meta)))
        self.tables.extend(other.tables)
        if other.footer:
            self.tables.append(Table(None, [], [], notes=list(other.footer)))
        return self


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# ---------------------------------------------------------------- text

def _render_table_text(t: Table) -> list[str]:
    out = []
    if t.title:
        out.append(t.title)
    if t.columns:
        marked = {(r, c) for r, c in t.marks}
        cells = [[str(r[0])] + [format_cell(v, t.kind_of(i, j)) + ("*" if (i, j) in marked else "")
                                for j, v in enumerate(r[1:])]
                 for i, r in enumerate(t.rows)]
        header = [t.label_header] + list(t.columns)
        widths = [max(len(row[i]) for row in cells + [header]) for i in range(len(header))]
        rule = "=" * (sum(widths) + 2 * (len(widths) - 1))
        out.append(rule)
        out.append("  ".join(h.ljust(widths[0]) if i == 0 else h.rjust(widths[i])
                             for i, h in enumerate(header)).rstrip())
        out.append(rule)
        for row in cells:
            out.append("  ".join(c.ljust(widths[0]) if i == 0 else c.rjust(widths[i])
                                 for i, c in enumerate(row)).rstrip())
        out.append(rule)
    out.extend(t.notes)
    return out


def render_text(report: Report) -> str:
    lines = [report.title]
    lines += report.meta
    for t in report.tables:
        lines.append("")
        lines += _render_table_text(t)
    if report.footer:
        lines.append("")
        lines += report.footer
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- csv

def render_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "row", "column", "value"])
    for t in report.tables:
        for r in t.rows:
            for col, v in zip(t.columns, r[1:]):
                w.writerow([t.title or "", r[0], col, "" if v is None else (repr(v) if isinstance(v, float) else v)])
    return buf.getvalue()


# ---------------------------------------------------------------- json

def to_dict(report: Report) -> dict:
    return {
        "title": report.title,
        "meta": list(report.meta),
        "tables": [{"title": t.title, "label_header": t.label_header, "columns": list(t.columns),
                    "kinds": list(t.kinds), "rows": [list(r) for r in t.rows], "notes": list(t.notes),
                    "row_kinds": {str(k): v for k, v in sorted(t.row_kinds.items())},
                    "marks": [list(m) for m in t.marks]}
                   for t in report.tables],
        "footer": list(report.footer),
    }


def from_dict(d: dict) -> Report:
    tables = [Table(t["title"], t["columns"], t["kinds"], [list(r) for r in t["rows"]],
                    t.get("label_header", ""), t.get("notes", []), dict(t.get("row_kinds", {})),
                    [list(m) for m in t.get("marks", [])]) for t in d["tables"]]
    return Report(d["title"], list(d["meta"]), tables, list(d.get("footer", [])))


def render_json(report: Report) -> str:
    return json.dumps(to_dict(report), indent=1, ensure_ascii=False) + "\n"


def parse_json(text: str) -> Report:
    return from_dict(json.loads(text))


def render(report: Report, fmt: str = "text") -> bytes:
    if fmt == "text":
        s = render_text(report)
    elif fmt == "csv":
        s = render_csv(report)
    elif fmt == "json":
        s = render_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return s.encode("utf-8")
