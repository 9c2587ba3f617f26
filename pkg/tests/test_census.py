from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kolakoski.census import (
    Census,
    CensusQueryError,
    DecadeRow,
    Deviation,
    decade_rows,
    format_deviation,
    is_power_of_ten,
)
from kolakoski.engine import KolakoskiEngine, PositionOverflowError, RunEvent
from kolakoski.sequence import CLASSICAL, SequenceParams, brute_prefix

from oracles import exhaustive_decade_max, prefix_counts

SUPPORTED = [(1, 2), (2, 1), (2, 3), (1, 3), (3, 1), (2, 5)]


def fresh(params):
    eng = KolakoskiEngine(params)
    census = Census(params)
    census.attach(eng)
    return eng, census


class TestFormatDeviation:
    @pytest.mark.parametrize(
        "num,den,text",
        [
            (1, 6, "1.667e-01"),
            (0, 2, "0.000e+00"),
            (1, 12, "8.333e-02"),
            (1, 2, "5.000e-01"),
            (3, 14, "2.143e-01"),
            (1, 8, "1.250e-01"),
            (1, 10**12, "1.000e-12"),
            (99999, 10**6, "1.000e-01"),
        ],
    )
    def test_values(self, num, den, text):
        assert format_deviation(Deviation(num, den)) == text

    def test_half_even(self):
        # 0.00012345 exactly: the fifth digit is a tie, rounded to even
        assert format_deviation(Deviation(12345, 10**8)) == "1.234e-04"
        assert format_deviation(Deviation(12355, 10**8)) == "1.236e-04"


class TestDeviation:
    def test_exact_comparisons_beyond_float(self):
        big = 10**15
        a = Deviation(big - 1, 2 * big)
        b = Deviation(big - 2, 2 * big - 2)
        assert (a > b) == (a.value > b.value)
        assert Deviation(1, 6) == Deviation(2, 12)
        assert Deviation(1, 6) < Deviation(1, 5)

    @given(st.integers(0, 10**15), st.integers(1, 2 * 10**15),
           st.integers(0, 10**15), st.integers(1, 2 * 10**15))
    def test_ordering_matches_fractions(self, n1, d1, n2, d2):
        a, b = Deviation(n1, d1), Deviation(n2, d2)
        assert (a < b) == (Fraction(n1, d1) < Fraction(n2, d2))
        assert (a == b) == (Fraction(n1, d1) == Fraction(n2, d2))


@settings(max_examples=200)
@given(st.integers(0, 2**51), st.integers(1, 2**51), st.integers(0, 2**51), st.integers(1, 2**51))
def test_kernel_fraction_compare(n1, d1, n2, d2):
    from kolakoski._kernels import fraction_greater

    assert fraction_greater(n1, d1, n2, d2) == (Fraction(n1, d1) > Fraction(n2, d2))


def test_kernel_fraction_compare_near_ties():
    from kolakoski._kernels import fraction_greater

    i = 10**15 - 7
    assert fraction_greater(i + 1, 2 * i, i, 2 * i)
    assert not fraction_greater(i, 2 * i, i + 1, 2 * i)
    assert not fraction_greater(i, 2 * i, i, 2 * i)
    assert fraction_greater(2 * i + 1, 4 * i, i, 2 * i)


def test_is_power_of_ten():
    assert [n for n in range(1, 2000) if is_power_of_ten(n)] == [1, 10, 100, 1000]
    assert not is_power_of_ten(0)


class TestRows:
    def test_table1_head(self):
        rows = decade_rows(CLASSICAL, 10**4)
        assert [(r.n, r.count, r.depth) for r in rows] == [
            (1, 1, 1), (10, 5, 4), (100, 49, 10), (1000, 502, 16), (10**4, 4996, 22)
        ]
        assert rows[0].deviation is None
        assert [format_deviation(r.deviation) for r in rows[1:]] == [
            "1.667e-01", "8.333e-02", "1.351e-02", "3.588e-03"
        ]

    def test_table2_head(self):
        rows = decade_rows(SequenceParams(2, 3), 1000)
        assert [(r.n, r.count, r.depth) for r in rows] == [
            (1, 1, 1), (10, 5, 3), (100, 51, 6), (1000, 502, 9)
        ]
        assert format_deviation(rows[1].deviation) == "2.143e-01"

    def test_final_partial_row(self):
        rows = decade_rows(CLASSICAL, 25)
        assert [r.n for r in rows] == [1, 10, 25]
        word = brute_prefix(CLASSICAL, 25)
        assert rows[-1].count == word.count(1)
        assert rows[-1].deviation.value == exhaustive_decade_max(word, 1, 10, 25)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_n_inside_opening_runs(self, n):
        rows = decade_rows(SequenceParams(1, 5), n)
        assert rows[-1].n == n
        assert rows[-1].count == brute_prefix(SequenceParams(1, 5), n).count(1)


@pytest.mark.parametrize("r,s", SUPPORTED)
def test_rows_match_exhaustive_recomputation(r, s):
    params = SequenceParams(r, s)
    word = brute_prefix(params, 10**4)
    counts = prefix_counts(word, params.counted_symbol)
    for row in decade_rows(params, 10**4):
        assert row.count == counts[row.n - 1]
        if row.n == 1:
            assert row.deviation is None
            continue
        expected = exhaustive_decade_max(word, params.counted_symbol, max(row.n // 10, 2), row.n)
        assert row.deviation.value == expected


@pytest.mark.parametrize("r,s", [(1, 2), (2, 3), (3, 1)])
def test_observe_agrees_with_bulk(r, s):
    params = SequenceParams(r, s)
    eng = KolakoskiEngine(params)
    census = Census(params)
    rows = []
    for run in eng.runs():
        rows += census.observe(run, eng.depth)
        s_ = census.counts
        assert s_.count_r + s_.count_s == s_.position
        if census.position >= 10**4:
            break
    assert rows == decade_rows(params, 10**4)


def test_observe_rejects_gaps():
    census = Census(CLASSICAL)
    with pytest.raises(ValueError):
        census.observe(RunEvent(2, 2, 5), 1)


def test_position_guard():
    eng, census = fresh(CLASSICAL)
    with pytest.raises(PositionOverflowError):
        census.consume(eng, 10**15 + 1)
    big = Census(CLASSICAL)
    big._state[0] = 10**15 - 1
    with pytest.raises(PositionOverflowError):
        big.observe(RunEvent(1, 2, 10**15), 1)


class TestCountsAt:
    def test_first_position(self):
        eng, census = fresh(CLASSICAL)
        c = census.counts_at(1, eng)
        assert (c.count_r, c.count_s) == (1, 0)

    def test_thirteen(self):
        eng, census = fresh(CLASSICAL)
        assert census.counts_at(13, eng).count_r == 6

    def test_million(self):
        eng, census = fresh(CLASSICAL)
        assert census.counts_at(10**6, eng).count_r == 499986

    def test_passed_position(self):
        eng, census = fresh(CLASSICAL)
        census.counts_at(1000, eng)
        assert census.counts_at(100, eng).count_r == 49
        with pytest.raises(CensusQueryError):
            census.counts_at(50, eng)
        with pytest.raises(CensusQueryError):
            Census(CLASSICAL).counts_at(5)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(SUPPORTED), st.lists(st.integers(1, 50_000), min_size=1, max_size=5))
    def test_against_oracle(self, rs, targets):
        params = SequenceParams(*rs)
        word = np.asarray(brute_prefix(params, 50_000))
        eng, census = fresh(params)
        for t in sorted(set(targets)):
            if t < census.position - max(rs):
                continue
            try:
                c = census.counts_at(t, eng)
            except CensusQueryError:
                continue
            assert c.count_r == int(np.sum(word[:t] == params.r))
            assert c.count_s == t - c.count_r


def test_frequency_bound_engine():
    eng, census = fresh(CLASSICAL)
    # every position up to 10**5 through the per-run path
    for run in eng.runs():
        before = census.counts
        census.observe(run, eng.depth)
        for i in range(1, run.length + 1):
            ones = before.count_r + (i if run.symbol == 1 else 0)
            twos = before.count_s + (0 if run.symbol == 1 else i)
            if before.position + i >= 2:
                assert twos <= 4 * ones and ones <= 4 * twos
        if census.position > 10**5:
            break
