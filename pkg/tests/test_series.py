import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from econo.series import (Dataset, PeriodSpan, QuarterPeriod, QuarterlySeries, SeriesError,
                          common_span, diff, fisher_z, format_number, lag, load_dataset,
                          parse_number, step_dummy)

from conftest import make_dataset

Q = QuarterPeriod.parse
finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


# ----------------------------------------------------------------- periods

def test_period_labels():
    assert Q("2008Q1") == QuarterPeriod(2008, 1)
    assert Q("mar.2008") == QuarterPeriod(2008, 1)
    assert Q("dic.2022") == QuarterPeriod(2022, 4)
    assert Q("ene.2010") == QuarterPeriod(2010, 1)
    assert Q("jul.2010") == QuarterPeriod(2010, 3)
    with pytest.raises(SeriesError):
        Q("feb.2010")
    with pytest.raises(SeriesError):
        QuarterPeriod(2010, 5)


@given(st.integers(1900, 2100), st.integers(1, 4), st.integers(1900, 2100), st.integers(1, 4))
def test_period_order_is_lexicographic(y1, q1, y2, q2):
    a, b = QuarterPeriod(y1, q1), QuarterPeriod(y2, q2)
    assert (a < b) == (y1 < y2 or (y1 == y2 and q1 < q2))
    assert b - a == (y2 - y1) * 4 + (q2 - q1)
    assert a.shift(b - a) == b


def test_span_length():
    span = PeriodSpan.parse("2008Q1 2023Q1")
    assert len(span) == 61
    assert QuarterPeriod(2015, 3) in span


# ----------------------------------------------------------------- numbers

def test_comma_decimal_cells():
    assert parse_number("24.088,41", "comma-decimal") == 24088.41
    assert parse_number("0,00", "comma-decimal") == 0.0
    assert parse_number("-1.234.567,5", "comma-decimal") == -1234567.5
    assert parse_number("24,088.41", "point-decimal") == 24088.41
    for bad in ("24.08,41", "1,2,3", "", "abc"):
        with pytest.raises(ValueError):
            parse_number(bad, "comma-decimal")


@given(finite, st.sampled_from(["comma-decimal", "point-decimal"]))
def test_number_round_trip(x, locale):
    assert parse_number(format_number(x, locale), locale) == x


# ----------------------------------------------------------------- loading

def test_builtin_dataset(raw_data):
    assert raw_data.range == PeriodSpan.parse("2008Q1 2023Q1")
    for name in ("PIB", "CAPITALFIJO", "IED"):
        assert len(raw_data[name]) == 61
    assert raw_data["PIB"][Q("2008Q1")] == 24088.41
    assert raw_data["CAPITALFIJO"][Q("2008Q1")] == 8270.65
    assert raw_data["IED"][Q("2008Q1")] == 8949.62
    assert raw_data["PIB"][Q("2023Q1")] == 70125.93
    assert raw_data["pib"] is raw_data["PIB"]


def _write(tmp_path, text):
    p = tmp_path / "d.csv"
    p.write_text(text, encoding="utf-8")
    return p


def test_load_reports_row_and_column(tmp_path):
    p = _write(tmp_path, "Periodo;A;B\nmar.2008;1,0;2,0\njun.2008;1,5;x\n")
    with pytest.raises(SeriesError, match=r"row 3, column 'B'"):
        load_dataset(p, "comma-decimal")


def test_load_rejects_gaps_and_duplicates(tmp_path):
    with pytest.raises(SeriesError, match="does not follow"):
        load_dataset(_write(tmp_path, "p,A\n2008Q1,1\n2008Q3,2\n"), "point-decimal")
    with pytest.raises(SeriesError, match="duplicate"):
        load_dataset(_write(tmp_path, "p,A,a\n2008Q1,1,2\n"), "point-decimal")


def test_load_point_decimal(tmp_path):
    d = load_dataset(_write(tmp_path, "period,X\n2008Q4,1.5\n2009Q1,2.5\n"), "point-decimal")
    assert d.range == PeriodSpan.parse("2008Q4 2009Q1")
    assert list(d["X"].values) == [1.5, 2.5]


# ----------------------------------------------------------------- transforms

def test_diff_examples(raw_data):
    assert list(diff(QuarterlySeries("c", Q("2000Q1"), [3.0, 3.0, 3.0])).values) == [0.0, 0.0]
    d = diff(raw_data["PIB"])
    assert d.name == "D(PIB)" and d.start == Q("2008Q2") and d.consumed == 1
    assert d[Q("2008Q2")] == pytest.approx(23898.72 - 24088.41)
    assert np.array_equal(diff(diff(raw_data["IED"])).values, diff(raw_data["IED"], 2).values)
    with pytest.raises(SeriesError):
        diff(QuarterlySeries("x", Q("2000Q1"), [1.0]))


def test_lag_examples(raw_data):
    pib = raw_data["PIB"]
    assert lag(pib, 0) is pib
    assert lag(pib, 1)[Q("2009Q2")] == pib[Q("2009Q1")] == 23247.62
    assert np.array_equal(lag(lag(pib, 1), 1).values, lag(pib, 2).values)
    assert lag(pib, 2).start == Q("2008Q3")
    with pytest.raises(SeriesError):
        lag(QuarterlySeries("x", Q("2000Q1"), [1.0, 2.0]), 2)


def test_step_dummy():
    span = PeriodSpan.parse("2008Q1 2023Q1")
    d1 = step_dummy(span, Q("2012Q1"), "D1")
    assert list(d1.values) == [0.0] * 16 + [1.0] * 45
    assert step_dummy(span, span.first).values.min() == 1.0
    with pytest.raises(SeriesError):
        step_dummy(span, Q("2023Q2"))


def test_fisher_z_examples(raw_data):
    x = QuarterlySeries("x", Q("2000Q1"), np.arange(1.0, 12.0))
    assert np.array_equal(fisher_z(x, 0).values, x.values)
    c = QuarterlySeries("c", Q("2000Q1"), np.full(10, 2.5))
    assert np.allclose(fisher_z(c, 7).values, 36 * 2.5)
    cf = raw_data["CAPITALFIJO"]
    z = fisher_z(cf, 7)
    assert z.start == Q("2009Q4") and z.consumed == 7
    rows = [cf[Q("2008Q1").shift(i)] for i in range(8)]   # 2008Q1..2009Q4
    assert z[Q("2009Q4")] == pytest.approx(sum(w * v for w, v in zip(range(1, 9), rows)))
    with pytest.raises(SeriesError):
        fisher_z(QuarterlySeries("x", Q("2000Q1"), np.ones(7)), 7)


@settings(max_examples=50)
@given(st.lists(st.floats(-1e6, 1e6), min_size=9, max_size=30), st.floats(-5, 5), st.floats(-5, 5),
       st.integers(0, 7))
def test_fisher_z_is_linear(xs, a, b, L):
    x = QuarterlySeries("x", Q("2000Q1"), xs)
    y = QuarterlySeries("y", Q("2000Q1"), xs[::-1])
    both = QuarterlySeries("s", Q("2000Q1"), a * x.values + b * y.values)
    want = a * fisher_z(x, L).values + b * fisher_z(y, L).values
    assert np.allclose(fisher_z(both, L).values, want, rtol=1e-9, atol=1e-6)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40), st.floats(-1e6, 1e6))
def test_diff_inverts_cumulative_sum(xs, x0):
    levels = np.concatenate([[x0], x0 + np.cumsum(xs)])
    s = QuarterlySeries("s", Q("2000Q1"), levels)
    assert np.allclose(diff(s).values, xs, atol=1e-6)


def test_dataset_rules():
    a = QuarterlySeries("A", Q("2000Q1"), [1.0, 2.0])
    with pytest.raises(SeriesError, match="duplicate"):
        Dataset([a, a.renamed("a")])
    d = Dataset([a])
    with pytest.raises(SeriesError):
        d.with_series(a.renamed("a"))
    assert d.with_series(a.renamed("a"), overwrite=True)["A"].name == "a"
    assert "a" in d and 3 not in d


def test_series_is_immutable():
    s = QuarterlySeries("s", Q("2000Q1"), [1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_common_span_and_adjusted_sample(data):
    lags = [lag(data[v], 5) for v in ("PIB", "CF", "IED")]
    span = common_span(lags + [data["PIB"]])
    assert span == PeriodSpan.parse("2009Q2 2023Q1")
    assert len(span) == 56
    with pytest.raises(SeriesError):
        common_span([QuarterlySeries("a", Q("2000Q1"), [1.0]), QuarterlySeries("b", Q("2001Q1"), [1.0])])


