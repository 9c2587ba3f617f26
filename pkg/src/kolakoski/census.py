"""Exact symbol counts and per-decade deviation over an engine stream.

The deviation of position i is ``|1/2 - c_i/i|`` for the counted symbol, kept
as the unreduced fraction ``|2 c_i - i| / (2 i)``.  Its maximum over each
decade ``(10**(m-1), 10**m]`` is reported in a :class:`DecadeRow` when the
stream reaches ``10**m``.  Positions 1 and 2 are never part of a decade.
"""

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from functools import total_ordering
from typing import List, Optional

import numpy as np

from . import _kernels as K
from .engine import (
    POSITION_LIMIT,
    KolakoskiEngine,
    PositionOverflowError,
    RunEvent,
    StackOverflowError,
)
from .sequence import SequenceParams


class CensusQueryError(LookupError):
    pass


@total_ordering
@dataclass(frozen=True, eq=False)
class Deviation:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0 or self.numerator < 0:
            raise ValueError(f"invalid deviation {self.numerator}/{self.denominator}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __eq__(self, other):
        if not isinstance(other, Deviation):
            return NotImplemented
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __lt__(self, other):
        if not isinstance(other, Deviation):
            return NotImplemented
        return self.numerator * other.denominator < other.numerator * self.denominator

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return format_deviation(self)


@dataclass(frozen=True)
class SymbolCensus:
    position: int
    count_r: int
    count_s: int


@dataclass(frozen=True)
class DecadeRow:
    n: int
    count: int
    depth: int
    deviation: Optional[Deviation]


_FOUR_DIGITS = Context(prec=4, rounding=ROUND_HALF_EVEN)


def format_deviation(d: Deviation) -> str:
    """Four significant digits in scientific notation, e.g. ``1.667e-01``."""
    if d.numerator == 0:
        return "0.000e+00"
    q = _FOUR_DIGITS.divide(Decimal(d.numerator), Decimal(d.denominator))
    sign, digits, exponent = q.as_tuple()
    digits = (digits + (0, 0, 0))[:4]
    exp10 = exponent + len(q.as_tuple().digits) - 1
    mantissa = f"{digits[0]}.{digits[1]}{digits[2]}{digits[3]}"
    return f"{'-' if sign else ''}{mantissa}e{exp10:+03d}"


def _row_from_buffer(values) -> DecadeRow:
    n, count, depth, num, den = (int(x) for x in values)
    return DecadeRow(n, count, depth, Deviation(num, den) if num >= 0 else None)


class Census:
    """Counts of both symbols plus the running decade maximum.

    Feed it runs in stream order, either one at a time with :meth:`observe` or
    in bulk straight from an engine with :meth:`consume`.  Completed decade
    rows accumulate in :attr:`rows`.
    """

    def __init__(self, params: SequenceParams):
        self.params = params
        state = np.zeros(K.CENSUS_SIZE, dtype=np.int64)
        state[K.C_COUNTED] = params.counted_symbol
        state[K.C_R] = params.r
        state[K.C_NEXT_DECADE] = 1
        state[K.C_DEV_NUM] = -1
        state[K.C_DEV_DEN] = 1
        self._state = state
        self._buf = np.zeros((K.ROW_CAPACITY, 5), dtype=np.int64)
        self.rows: List[DecadeRow] = []
        self._last: Optional[RunEvent] = None

    @property
    def position(self) -> int:
        return int(self._state[K.C_POSITION])

    @property
    def counts(self) -> SymbolCensus:
        return SymbolCensus(
            self.position, int(self._state[K.C_COUNT_R]), int(self._state[K.C_COUNT_S])
        )

    @property
    def next_decade(self) -> int:
        return int(self._state[K.C_NEXT_DECADE])

    @property
    def running_deviation(self) -> Optional[Deviation]:
        num = int(self._state[K.C_DEV_NUM])
        return Deviation(num, int(self._state[K.C_DEV_DEN])) if num >= 0 else None

    def count_of(self, symbol: int, counts: Optional[SymbolCensus] = None) -> int:
        counts = counts or self.counts
        return counts.count_r if symbol == self.params.r else counts.count_s

    def _collect(self, nrows, stop) -> List[DecadeRow]:
        out = [_row_from_buffer(self._buf[i]) for i in range(nrows)]
        self.rows.extend(row for row in out if row.n != stop)
        return out

    def observe(self, event: RunEvent, engine_depth: int, stop: int = 0) -> List[DecadeRow]:
        """Account one run; returns the rows completed inside it."""
        if event.start_position != self.position + 1:
            raise ValueError(
                f"run starts at {event.start_position}, census is at {self.position}"
            )
        if event.start_position + event.length - 1 > POSITION_LIMIT:
            raise PositionOverflowError(f"position would exceed {POSITION_LIMIT}")
        self._state[K.C_STOP] = stop
        nrows = K.observe_run(self._state, event.symbol, event.length, engine_depth, self._buf, 0)
        self._last = event
        return self._collect(nrows, stop)

    def attach(self, engine: KolakoskiEngine, stop: int = 0) -> List[DecadeRow]:
        """Observe the runs a freshly built engine emitted on construction."""
        rows = []
        for event in engine.initial_runs:
            rows += self.observe(event, engine.depth, stop)
        engine.initial_runs = []
        return rows

    def consume(self, engine: KolakoskiEngine, until: int, stop: int = 0) -> List[DecadeRow]:
        """Stream ``engine`` until its position reaches ``until``.

        Rows are produced at every power of ten passed and, if given, at
        ``stop`` (which does not close the decade).
        """
        if engine.position != self.position:
            raise ValueError(
                f"engine at {engine.position} but census at {self.position}"
            )
        if until > POSITION_LIMIT:
            raise PositionOverflowError(f"position {until} exceeds {POSITION_LIMIT}")
        self._state[K.C_STOP] = stop
        out: List[DecadeRow] = []
        while engine.position < until:
            nrows = K.stream_census(*engine._arrays, self._state, self._buf, until)
            if nrows < 0:
                raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
            out += self._collect(nrows, stop)
        self._state[K.C_STOP] = 0
        self._last = None
        return out

    def _last_run(self, engine: Optional[KolakoskiEngine]) -> Optional[RunEvent]:
        if self._last is not None and self._last.end_position == self.position:
            return self._last
        if engine is not None and engine.position == self.position:
            cell = engine.stack[0]
            return RunEvent(cell.symbol, cell.remaining, self.position - cell.remaining + 1)
        return None

    def counts_at(self, target: int, engine: Optional[KolakoskiEngine] = None) -> SymbolCensus:
        """Exact counts at ``target``, streaming ``engine`` forward if needed.

        Past positions are answerable only inside the most recent run or at a
        completed decade row.
        """
        if target < 1:
            raise CensusQueryError("target must be at least 1")
        if target > self.position:
            if engine is None:
                raise CensusQueryError(f"target {target} is ahead of the census and no engine was given")
            self.consume(engine, target)
        run = self._last_run(engine)
        if run is not None and run.start_position <= target:
            counts = self.counts
            excess = self.position - target
            if run.symbol == self.params.r:
                return SymbolCensus(target, counts.count_r - excess, counts.count_s)
            return SymbolCensus(target, counts.count_r, counts.count_s - excess)
        for row in self.rows:
            if row.n == target:
                other = target - row.count
                if self.params.counted_symbol == self.params.r:
                    return SymbolCensus(target, row.count, other)
                return SymbolCensus(target, other, row.count)
        raise CensusQueryError(f"position {target} has already been passed")


def is_power_of_ten(n: int) -> bool:
    if n < 1:
        return False
    while n % 10 == 0:
        n //= 10
    return n == 1


def decade_rows(params: SequenceParams, n_max: int) -> List[DecadeRow]:
    """Rows at 1, 10, 100, ... up to ``n_max``, plus ``n_max`` itself when it
    is not a power of ten."""
    engine = KolakoskiEngine(params)
    census = Census(params)
    stop = 0 if is_power_of_ten(n_max) else n_max
    rows = [row for row in census.attach(engine, stop) if row.n <= n_max]
    if n_max > census.position:
        rows += census.consume(engine, n_max, stop=stop)
    return rows
