"""Equation-specification and series-generation mini-language.

Equations are whitespace-separated term lists, dependent variable first::

    PIB C ZCF ZIED AR(1) AR(2)

Terms are ``C`` (constant), ``NAME``, ``NAME(-k)`` (lag k >= 1), ``D(NAME)``
and ``D(NAME(-k))``; ``AR(n)`` adds an autoregressive error term.  Generate
lines are ``NAME = expr`` with ``+ - * /``, parentheses, numbers and the same
series references.  Names are case-insensitive.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .series import (Dataset, PeriodSpan, QuarterlySeries, SeriesError, common_span,
                     diff, lag)


class SpecSyntaxError(ValueError):
    def __init__(self, msg: str, column: int | None = None):
        self.column = column
        super().__init__(msg if column is None else f"{msg} at column {column}")


class UnresolvedName(KeyError):
    pass


# ------------------------------------------------------------------ AST

@dataclass(frozen=True)
class Constant:
    def __str__(self):
        return "C"


@dataclass(frozen=True)
class SeriesRef:
    name: str
    lag: int = 0  # non-positive, EViews style: PIB(-1) -> lag=-1

    def __str__(self):
        return self.name if self.lag == 0 else f"{self.name}({self.lag})"


@dataclass(frozen=True)
class Difference:
    inner: SeriesRef

    def __str__(self):
        return f"D({self.inner})"


Term = Union[Constant, SeriesRef, Difference]


@dataclass(frozen=True)
class EquationSpec:
    dependent: Union[SeriesRef, Difference]
    regressors: tuple
    ar_orders: tuple = ()

    @property
    def has_constant(self) -> bool:
        return any(isinstance(t, Constant) for t in self.regressors)

    @property
    def names(self) -> list[str]:
        return [str(t) for t in self.regressors]

    def without_ar(self) -> "EquationSpec":
        return EquationSpec(self.dependent, self.regressors, ())

    def __str__(self):
        parts = [str(self.dependent)] + [str(t) for t in self.regressors]
        parts += [f"AR({p})" for p in self.ar_orders]
        return " ".join(parts)


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RE_REF = re.compile(rf"^({_IDENT})(?:\(\s*(-?\d+)\s*\))?$")
_RE_DIFF = re.compile(r"^[Dd]\((.*)\)$")
_RE_AR = re.compile(r"^[Aa][Rr]\(\s*(-?\d+)\s*\)$")


def _parse_ref(tok: str, col: int) -> SeriesRef:
    m = _RE_REF.match(tok)
    if not m:
        raise SpecSyntaxError(f"malformed term {tok!r}", col)
    name = m.group(1).upper()
    if name == "C":
        raise SpecSyntaxError("C cannot be lagged or differenced", col)
    k = 0
    if m.group(2) is not None:
        k = int(m.group(2))
        if k >= 0:
            raise SpecSyntaxError(f"lag in {tok!r} must be negative, e.g. X(-1)", col)
    return SeriesRef(name, k)


def _parse_term(tok: str, col: int) -> Term:
    if tok.upper() == "C":
        return Constant()
    m = _RE_DIFF.match(tok)
    if m:
        return Difference(_parse_ref(m.group(1).strip(), col + 2))
    return _parse_ref(tok, col)


def parse_equation(text: str) -> EquationSpec:
    """Parse an equation specification string."""
    toks = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", text or "")]
    if not toks:
        raise SpecSyntaxError("empty equation specification")
    dep_tok, dep_col = toks[0]
    dep = _parse_term(dep_tok, dep_col)
    if isinstance(dep, Constant):
        raise SpecSyntaxError("dependent variable cannot be C", dep_col)
    regs: list[Term] = []
    ars: list[int] = []
    for tok, col in toks[1:]:
        m = _RE_AR.match(tok)
        if m:
            n = int(m.group(1))
            if n < 1:
                raise SpecSyntaxError(f"AR order must be >= 1 in {tok!r}", col)
            if n in ars:
                raise SpecSyntaxError(f"duplicate AR({n})", col)
            ars.append(n)
            continue
        t = _parse_term(tok, col)
        if isinstance(t, Constant) and any(isinstance(r, Constant) for r in regs):
            raise SpecSyntaxError("constant C given twice", col)
        regs.append(t)
    return EquationSpec(dep, tuple(regs), tuple(sorted(ars)))


# ------------------------------------------------------------ generate exprs

@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Neg:
    operand: object

    def __str__(self):
        return f"(-{self.operand})"


GenrExpr = Union[Num, SeriesRef, Difference, BinOp, Neg]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    rf"|(?P<name>{_IDENT})|(?P<op>[-+*/()=]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise SpecSyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        start = m.start(kind) + 1
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    # unary := '-' unary | atom ; atom := num | ref | D(ref) | '(' expr ')'
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, val, col = self.take()
        if val != value:
            what = "end of input" if kind == "end" else repr(val)
            raise SpecSyntaxError(f"expected {value!r}, found {what}", col)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def _lag_suffix(self):
        # after NAME: optional '(' '-' num ')'
        if self.peek()[:2] != ("op", "("):
            return 0
        _, _, col = self.take()
        self.expect("-")
        kind, val, c2 = self.take()
        if kind != "num" or not val.isdigit() or int(val) < 1:
            raise SpecSyntaxError("lag must be a positive integer", c2)
        self.expect(")")
        return -int(val)

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            name = val.upper()
            if name == "D" and self.peek()[:2] == ("op", "("):
                self.take()
                k2, v2, c2 = self.take()
                if k2 != "name":
                    raise SpecSyntaxError("D() takes a series name", c2)
                ref = SeriesRef(v2.upper(), self._lag_suffix())
                self.expect(")")
                return Difference(ref)
            if name == "C":
                raise SpecSyntaxError("C is reserved for the regression constant", col)
            return SeriesRef(name, self._lag_suffix())
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise SpecSyntaxError(f"unexpected {what}", col)


def parse_expr(text: str) -> GenrExpr:
    p = _Parser(_tokenize(text))
    node = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise SpecSyntaxError(f"unexpected {val!r}", col)
    return node


def parse_genr(text: str) -> tuple[str, GenrExpr]:
    """Parse ``NAME = expr``."""
    toks = _tokenize(text)
    if len(toks) < 3 or toks[0][0] != "name" or toks[1][1] != "=":
        col = toks[1][2] if len(toks) > 1 else 1
        raise SpecSyntaxError("expected 'NAME = expression'", col)
    target = toks[0][1].upper()
    if target == "C":
        raise SpecSyntaxError("C is reserved", toks[0][2])
    p = _Parser(toks)
    p.i = 2
    node = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise SpecSyntaxError(f"unexpected {val!r}", col)
    return target, node


# --------------------------------------------------------------- evaluation

def resolve(term: Union[SeriesRef, Difference], data: Dataset) -> QuarterlySeries:
    """Materialise a series reference (with lag / difference) over ``data``."""
    if isinstance(term, Difference):
        return diff(resolve(term.inner, data)).renamed(str(term))
    if term.name not in data:
        raise UnresolvedName(f"unresolved series name {term.name!r}")
    s = data[term.name]
    return lag(s, -term.lag).renamed(str(term))


def _refs(node) -> list:
    if isinstance(node, (SeriesRef, Difference)):
        return [node]
    if isinstance(node, BinOp):
        return _refs(node.left) + _refs(node.right)
    if isinstance(node, Neg):
        return _refs(node.operand)
    return []


def evaluate(node: GenrExpr, data: Dataset, name: str = "GENR") -> QuarterlySeries:
    """Evaluate over the periods where every referenced series is available."""
    refs = {r: resolve(r, data) for r in _refs(node)}
    if refs:
        span = common_span(refs.values())
        consumed = max(s.consumed for s in refs.values())
    else:
        span = data.range
        consumed = 0
    cols = {r: s.window(span) for r, s in refs.items()}

    def ev(n):
        if isinstance(n, Num):
            return np.full(len(span), n.value)
        if isinstance(n, (SeriesRef, Difference)):
            return cols[n]
        if isinstance(n, Neg):
            return -ev(n.operand)
        a, b = ev(n.left), ev(n.right)
        if n.op == "+":
            return a + b
        if n.op == "-":
            return a - b
        if n.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b

    return QuarterlySeries(name, span.first, ev(node), consumed)


def generate(data: Dataset, line: str, overwrite: bool = False,
             protected: set[str] | None = None) -> Dataset:
    """Run one ``NAME = expr`` line and return the extended dataset.

    Names in ``protected`` (raw series) may only be replaced with ``overwrite``.
    """
    target, node = parse_genr(line)
    if target in data:
        is_raw = protected is None or target in {p.upper() for p in protected}
        if is_raw and not overwrite:
            raise SeriesError(f"refusing to overwrite existing series {target!r}")
    return data.with_series(evaluate(node, data, target), overwrite=True)


@dataclass(frozen=True)
class Design:
    y: np.ndarray
    X: np.ndarray
    names: list
    sample: PeriodSpan
    dependent: str


def build_design(spec: EquationSpec, data: Dataset, sample: PeriodSpan | None = None) -> Design:
    """Stack y and X over the periods where every term (and AR lag) exists.

    AR orders push the start forward by ``max(ar_orders)`` so the
    quasi-differenced residual is defined for every retained row.
    """
    dep = resolve(spec.dependent, data)
    cols = [None if isinstance(t, Constant) else resolve(t, data) for t in spec.regressors]
    avail = common_span([dep] + [c for c in cols if c is not None])
    first, last = avail.first, avail.last
    if spec.ar_orders:
        first = first.shift(max(spec.ar_orders))
    if sample is not None:
        first, last = max(first, sample.first), min(last, sample.last)
    if last < first:
        raise SeriesError(f"empty effective sample for {spec}")
    span = PeriodSpan(first, last)
    X = np.column_stack([np.ones(len(span)) if c is None else c.window(span) for c in cols]) \
        if cols else np.empty((len(span), 0))
    return Design(dep.window(span).copy(), X, spec.names, span, str(spec.dependent))
