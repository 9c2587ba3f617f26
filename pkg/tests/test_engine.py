import math

import numpy as np
import pytest

from kolakoski.census import Census
from kolakoski.engine import (
    CursorCell,
    KolakoskiEngine,
    RunEvent,
    depth_increases,
    engine_symbols,
    max_work_ratio,
    new_engine,
    symbol_chunks,
)
from kolakoski.sequence import CLASSICAL, SequenceParams, brute_prefix, rl_encode

SUPPORTED = [(1, 2), (2, 1), (2, 3), (1, 3), (3, 1), (2, 5)]


def cells(*pairs):
    return [CursorCell(*p) for p in pairs]


class TestConstruction:
    def test_classical(self):
        eng, runs = new_engine(CLASSICAL)
        assert runs == [RunEvent(1, 1, 1), RunEvent(2, 2, 2)]
        assert eng.stack == cells((2, 2))
        assert eng.position == 3 and eng.row_position == 2
        assert eng.depth == 1
        assert eng.prefix_emitted

    @pytest.mark.parametrize("r,s", [(2, 3), (2, 1)])
    def test_r_at_least_two(self, r, s):
        eng, runs = new_engine(SequenceParams(r, s))
        assert runs == [RunEvent(2, 2, 1)]
        assert eng.stack == cells((2, 2))
        assert not eng.prefix_emitted and eng.position == 2


class TestAdvanceLevel:
    def test_fresh_cell_skips_its_first_symbol(self):
        eng = KolakoskiEngine(CLASSICAL)
        assert eng.advance_level(1) == 2
        assert eng.stack == cells((2, 2), (2, 1))

    def test_sibling_step(self):
        eng = KolakoskiEngine(CLASSICAL)
        eng.next_run()
        eng.next_run()
        assert eng.stack[1] == CursorCell(1, 2)
        assert eng.advance_level(1) == 1
        assert eng.stack[1] == CursorCell(1, 1)

    def test_recursion_to_a_new_top(self):
        eng = KolakoskiEngine(CLASSICAL)
        for _ in range(3):
            eng.next_run()
        assert eng.stack == cells((1, 1), (1, 1), (2, 1))
        assert eng.advance_level(1) == 2
        assert eng.stack[1:] == cells((2, 1), (1, 2), (2, 1))

    def test_level_range(self):
        eng = KolakoskiEngine(CLASSICAL)
        with pytest.raises(ValueError):
            eng.advance_level(0)
        with pytest.raises(ValueError):
            eng.advance_level(3)


def test_classical_golden_trace():
    eng, runs = new_engine(CLASSICAL)
    trace = [(runs, eng.stack)]
    for _ in range(4):
        run = eng.next_run()
        trace.append(([run], eng.stack))
    assert trace == [
        ([RunEvent(1, 1, 1), RunEvent(2, 2, 2)], cells((2, 2))),
        ([RunEvent(1, 2, 4)], cells((1, 2), (2, 1))),
        ([RunEvent(2, 1, 6)], cells((2, 1), (1, 2), (2, 1))),
        ([RunEvent(1, 1, 7)], cells((1, 1), (1, 1), (2, 1))),
        ([RunEvent(2, 2, 8)], cells((2, 2), (2, 1), (1, 2), (2, 1))),
    ]
    assert eng.depth == 4 and eng.position == 9


def test_k23_first_runs_follow_the_oracle():
    eng = KolakoskiEngine(SequenceParams(2, 3))
    runs = [eng.next_run() for _ in range(3)]
    assert [(r.symbol, r.length) for r in runs] == [(3, 2), (2, 3), (3, 3)]
    oracle = rl_encode(brute_prefix(SequenceParams(2, 3), 10)).lengths
    assert [2] + [r.length for r in runs] == oracle


@pytest.mark.parametrize("r,s", SUPPORTED)
def test_runs_alternate_and_tile(r, s):
    params = SequenceParams(r, s)
    eng = KolakoskiEngine(params)
    prev = None
    pos = 0
    for _, run in zip(range(5000), eng.runs()):
        assert run.start_position == pos + 1
        if run.start_position > 1 or r != 1:
            assert run.length in params.alphabet
        if prev is not None:
            assert run.symbol != prev.symbol
        pos = run.end_position
        prev = run
    assert eng.position == pos


@pytest.mark.parametrize("r,s", SUPPORTED)
def test_engine_matches_oracle(r, s):
    params = SequenceParams(r, s)
    n = 200_000
    assert np.array_equal(engine_symbols(params, n), np.asarray(brute_prefix(params, n)))


@pytest.mark.parametrize("n", [1, 2, 3, 7, 1000])
def test_short_prefixes(n):
    for r, s in SUPPORTED:
        params = SequenceParams(r, s)
        assert engine_symbols(params, n).tolist() == brute_prefix(params, n)


def test_chunked_stream_is_seamless():
    params = SequenceParams(2, 5)
    joined = np.concatenate(list(symbol_chunks(params, 10_007, chunk=13)))
    assert joined.tolist() == brute_prefix(params, 10_007)


def test_work_ledger_identity():
    eng = KolakoskiEngine(CLASSICAL)
    for _ in range(20_000):
        eng.next_run()
    prof = eng.work_profile()
    assert prof.p[0] == eng.runs_emitted == 20_000
    assert prof.p[1] == prof.p[0]
    for k in range(1, len(prof.p)):
        assert prof.p[k] == prof.a[k] + prof.b[k]


def test_work_profile_is_a_copy():
    eng = KolakoskiEngine(CLASSICAL)
    eng.next_run()
    prof = eng.work_profile()
    prof.p[0] = 99
    assert eng.work_profile().p[0] == 1


def test_table_depths_small():
    got = {d: pos for d, pos in depth_increases(CLASSICAL, 100)}
    assert got[1] == 1 and got[4] == 8


def test_classical_depth_bound_to_1e6():
    for depth, start in depth_increases(CLASSICAL, 10**6):
        row_pos = max(start - 1, 1)
        assert depth <= math.ceil(math.log(row_pos) / math.log(6 / 5)) + 1


def test_work_ratio_small():
    worst, eng = max_work_ratio(CLASSICAL, 100_000)
    assert worst <= 8
    assert eng.runs_emitted == 100_000


def test_snapshot_restore_continues_identically():
    params = SequenceParams(2, 3)
    eng = KolakoskiEngine(params)
    census = Census(params)
    census.attach(eng)
    census.consume(eng, 2_600_000)
    assert eng.runs_emitted >= 10**6
    ckpt = eng.snapshot(census)
    twin = ckpt.to_engine()
    assert twin.stack == eng.stack and twin.work_profile() == eng.work_profile()
    a = [eng.next_run() for _ in range(1000)]
    b = [twin.next_run() for _ in range(1000)]
    assert a == b
