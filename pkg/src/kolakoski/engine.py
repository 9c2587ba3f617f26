"""Logarithmic-space streaming of K(r, s) through a stack of level cursors.

Cell 0 holds the run currently being emitted; cell k >= 1 holds the run at
height k of the generation tree that contains the ancestor of cell k-1, with
``remaining`` counting the not-yet-used symbols of that run (the current one
included).  Advancing cell k either steps to a sibling or, when the run is
used up, advances cell k+1 and writes a new run whose length is the symbol
found there.

For K(1, s) the leading 1 is emitted literally and the engine walks the row
K' that follows it, which is itself a fixed point of run-length decoding
starting with s.  For r >= 2 the sequence is walked directly.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

from . import _kernels as K
from .sequence import SequenceParams

POSITION_LIMIT = 10**15


class StackOverflowError(RuntimeError):
    """The cursor stack outgrew its preallocated capacity."""


class PositionOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class CursorCell:
    symbol: int
    remaining: int


@dataclass(frozen=True)
class RunEvent:
    symbol: int
    length: int
    start_position: int

    @property
    def end_position(self):
        return self.start_position + self.length - 1


@dataclass
class WorkProfile:
    """Per-level counters: ``p`` content changes, ``a`` increments that found
    the cell used up, ``b`` increments absorbed by stepping to a sibling."""

    p: List[int] = field(default_factory=list)
    a: List[int] = field(default_factory=list)
    b: List[int] = field(default_factory=list)

    @property
    def total(self):
        return sum(self.p)

    def ratios(self):
        """``p[k+1] / p[k]`` for every level with a successor."""
        return [self.p[k + 1] / self.p[k] for k in range(len(self.p) - 1) if self.p[k]]


class KolakoskiEngine:
    """Streams the runs of K(r, s) using O(log n) memory.

    Construction emits the first run(s) of the sequence; they are available as
    :attr:`initial_runs`.  Each :meth:`next_run` call then produces the next
    run in order.
    """

    def __init__(self, params: SequenceParams, _restore=None):
        self.params = params
        cap = K.STACK_CAPACITY
        self._sym = np.zeros(cap, dtype=np.int64)
        self._rem = np.zeros(cap, dtype=np.int64)
        self._p = np.zeros(cap, dtype=np.int64)
        self._a = np.zeros(cap, dtype=np.int64)
        self._b = np.zeros(cap, dtype=np.int64)
        self._meta = np.zeros(K.META_SIZE, dtype=np.int64)
        self._meta[K.M_R] = params.r
        self._meta[K.M_S] = params.s
        sigma = params.row_start_symbol
        self._meta[K.M_ROW_START] = sigma
        self.prefix_emitted = params.has_prefix
        self.initial_runs: List[RunEvent] = []
        if _restore is not None:
            return
        self._sym[0] = sigma
        self._rem[0] = sigma
        self._meta[K.M_DEPTH] = 1
        if self.prefix_emitted:
            self.initial_runs.append(RunEvent(1, 1, 1))
        start = len(self.initial_runs) + 1
        self.initial_runs.append(RunEvent(sigma, sigma, start))
        self._meta[K.M_POSITION] = start + sigma - 1

    @property
    def _arrays(self):
        return self._sym, self._rem, self._p, self._a, self._b, self._meta

    @property
    def position(self) -> int:
        """Symbols of K(r, s) emitted so far, prefix included."""
        return int(self._meta[K.M_POSITION])

    @property
    def row_position(self) -> int:
        """Position within the self-generating row the engine walks."""
        return self.position - (1 if self.prefix_emitted else 0)

    @property
    def depth(self) -> int:
        return int(self._meta[K.M_DEPTH])

    @property
    def runs_emitted(self) -> int:
        return int(self._p[0])

    @property
    def stack(self) -> List[CursorCell]:
        d = self.depth
        return [CursorCell(int(x), int(y)) for x, y in zip(self._sym[:d], self._rem[:d])]

    def work_profile(self) -> WorkProfile:
        d = self.depth
        return WorkProfile(
            [int(x) for x in self._p[:d]],
            [int(x) for x in self._a[:d]],
            [int(x) for x in self._b[:d]],
        )

    def advance_level(self, k: int) -> int:
        """Advance cell ``k`` (creating it on top of the stack if needed) and
        return its current symbol."""
        if not 1 <= k <= self.depth:
            raise ValueError(f"level must be in 1..{self.depth}, got {k}")
        g = K.advance_level(*self._arrays, k)
        if g < 0:
            raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
        return int(g)

    def next_run(self) -> RunEvent:
        if self.position >= POSITION_LIMIT:
            raise PositionOverflowError(f"position would exceed {POSITION_LIMIT}")
        g = K.next_run(*self._arrays)
        if g < 0:
            raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
        return RunEvent(int(self._sym[0]), int(g), self.position - int(g) + 1)

    def runs(self) -> Iterator[RunEvent]:
        """Endless stream: the initial runs (if still pending) then every
        subsequent run."""
        pending, self.initial_runs = self.initial_runs, []
        yield from pending
        while True:
            yield self.next_run()

    def fill(self, out: np.ndarray, start: int = 0) -> int:
        """Stream symbols into ``out[start:]``.

        The engine always advances by whole runs; the return value is the
        number of symbols of the last run that did not fit.
        """
        left = K.fill_symbols(*self._arrays, out, start)
        if left < 0:
            raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
        return int(left)

    def snapshot(self, census):
        """Checkpoint of this engine together with the census fed by it."""
        from .persistence import CheckpointState

        return CheckpointState.capture(self, census)

    @classmethod
    def from_state(cls, params, position, stack, prefix_emitted, p, a, b):
        """Rebuild an engine from raw state (see :func:`restore`)."""
        if prefix_emitted != params.has_prefix:
            raise ValueError("prefix flag does not match the sequence parameters")
        depth = len(stack)
        if not 1 <= depth <= K.STACK_CAPACITY:
            raise ValueError(f"stack depth {depth} out of range")
        if not (len(p) == len(a) == len(b) == depth):
            raise ValueError("work profile length does not match stack depth")
        eng = cls(params, _restore=True)
        for k, (symbol, remaining) in enumerate(stack):
            if symbol not in params.alphabet:
                raise ValueError(f"cell {k} symbol {symbol} not in {params.alphabet}")
            if not 1 <= remaining <= params.max_symbol:
                raise ValueError(f"cell {k} remaining {remaining} out of range")
            eng._sym[k] = symbol
            eng._rem[k] = remaining
        eng._p[:depth] = p
        eng._a[:depth] = a
        eng._b[:depth] = b
        eng._meta[K.M_DEPTH] = depth
        eng._meta[K.M_POSITION] = position
        eng._meta[K.M_WORK] = sum(p)
        return eng


def new_engine(params: SequenceParams) -> Tuple[KolakoskiEngine, List[RunEvent]]:
    eng = KolakoskiEngine(params)
    return eng, list(eng.initial_runs)


def restore(checkpoint) -> KolakoskiEngine:
    return checkpoint.to_engine()


def symbol_chunks(params: SequenceParams, n: int, chunk: int = 1 << 20) -> Iterator[np.ndarray]:
    """First ``n`` symbols of K(r, s) from the cursor engine, in arrays of at
    most ``chunk`` symbols."""
    if n < 1:
        raise ValueError("n must be at least 1")
    eng = KolakoskiEngine(params)
    pending = [(run.symbol, run.length) for run in eng.initial_runs]
    eng.initial_runs = []
    done = 0
    while done < n:
        out = np.empty(min(chunk, n - done), dtype=np.int64)
        i = 0
        while pending and i < len(out):
            symbol, length = pending.pop(0)
            take = min(length, len(out) - i)
            out[i:i + take] = symbol
            i += take
            if take < length:
                pending.insert(0, (symbol, length - take))
        if i < len(out):
            left = eng.fill(out, i)
            if left:
                pending.append((int(eng._sym[0]), left))
        done += len(out)
        yield out


def engine_symbols(params: SequenceParams, n: int) -> np.ndarray:
    """First ``n`` symbols of K(r, s) produced by the cursor engine."""
    return np.concatenate(list(symbol_chunks(params, n, chunk=max(n, 1))))


def depth_increases(params: SequenceParams, until: int) -> List[Tuple[int, int]]:
    """``(depth, start position)`` for each depth reached while streaming to
    ``until``; the position is that of the run that triggered the increase."""
    eng = KolakoskiEngine(params)
    out = np.zeros(K.STACK_CAPACITY + 1, dtype=np.int64)
    out[1] = 1
    if K.depth_log(*eng._arrays, until, out) < 0:
        raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
    return [(d, int(out[d])) for d in range(1, eng.depth + 1)]


def max_work_ratio(params: SequenceParams, n_runs: int, check_from: int = 1000) -> Tuple[float, KolakoskiEngine]:
    """Worst total-work / runs ratio over ``check_from <= runs <= n_runs``."""
    eng = KolakoskiEngine(params)
    worst = K.work_scan(*eng._arrays, n_runs, check_from)
    if worst < 0:
        raise StackOverflowError(f"cursor stack exceeded {K.STACK_CAPACITY} levels")
    return float(worst), eng
