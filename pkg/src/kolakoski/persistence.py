"""Versioned, integrity-checked checkpoint files.

A checkpoint is one JSON object whose keys appear in a fixed order.  Every
integer is written as a decimal string so readers never truncate 64-bit
values.  The ``digest`` field is the CRC-64/ECMA-182 of the compact
serialisation (``separators=(",", ":")``) of all preceding fields, as 16
lowercase hex digits.
"""

import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import crc

from . import _kernels as K
from .census import Census, DecadeRow, Deviation
from .engine import KolakoskiEngine
from .sequence import SequenceParams

FORMAT_VERSION = 1

_crc64 = crc.Calculator(crc.Crc64.CRC64, optimized=True)


class CheckpointError(Exception):
    pass


class CheckpointIOError(CheckpointError, OSError):
    pass


class MalformedCheckpointError(CheckpointError, ValueError):
    pass


class FormatVersionError(CheckpointError):
    pass


class DigestMismatchError(CheckpointError):
    pass


class InvariantViolationError(CheckpointError, ValueError):
    pass


@dataclass
class CheckpointState:
    params: SequenceParams
    position: int
    stack: List[Tuple[int, int]]
    prefix_emitted: bool
    counts: Tuple[int, int]
    decade: int
    deviation: Optional[Deviation]
    rows: List[DecadeRow] = field(default_factory=list)
    p: List[int] = field(default_factory=list)
    a: List[int] = field(default_factory=list)
    b: List[int] = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    @classmethod
    def capture(cls, engine: KolakoskiEngine, census: Census) -> "CheckpointState":
        """Snapshot an engine and its census; both must sit at the same run
        boundary."""
        if engine.position != census.position:
            raise ValueError(
                f"engine at {engine.position} but census at {census.position}"
            )
        if engine.initial_runs:
            raise ValueError("census has not observed the engine's opening runs")
        profile = engine.work_profile()
        counts = census.counts
        return cls(
            params=engine.params,
            position=engine.position,
            stack=[(c.symbol, c.remaining) for c in engine.stack],
            prefix_emitted=engine.prefix_emitted,
            counts=(counts.count_r, counts.count_s),
            decade=census.next_decade,
            deviation=census.running_deviation,
            rows=list(census.rows),
            p=profile.p,
            a=profile.a,
            b=profile.b,
        )

    def validate(self) -> None:
        """Raise :class:`InvariantViolationError` on inconsistent content."""
        prm = self.params
        try:
            if not self.stack:
                raise ValueError("empty cursor stack")
            for k, (symbol, remaining) in enumerate(self.stack):
                if symbol not in prm.alphabet:
                    raise ValueError(f"cell {k} symbol {symbol} not in {prm.alphabet}")
                if not 1 <= remaining <= prm.max_symbol:
                    raise ValueError(f"cell {k} remaining {remaining} outside 1..{prm.max_symbol}")
            if self.prefix_emitted != prm.has_prefix:
                raise ValueError("prefix flag does not match the sequence parameters")
            if min(self.counts) < 0 or sum(self.counts) != self.position:
                raise ValueError(f"counts {self.counts} do not sum to position {self.position}")
            if not len(self.p) == len(self.a) == len(self.b) == len(self.stack):
                raise ValueError("work profile length does not match stack depth")
            for k in range(1, len(self.p)):
                if self.p[k] != self.a[k] + self.b[k]:
                    raise ValueError(f"work ledger broken at level {k}")
            if self.decade < 1 or self.decade > 10 * max(self.position, 1):
                raise ValueError(f"decade endpoint {self.decade} inconsistent with position")
            if len(self.stack) > K.STACK_CAPACITY:
                raise ValueError("stack deeper than supported")
        except ValueError as exc:
            raise InvariantViolationError(str(exc)) from None

    def to_engine(self) -> KolakoskiEngine:
        self.validate()
        return KolakoskiEngine.from_state(
            self.params, self.position, self.stack, self.prefix_emitted, self.p, self.a, self.b
        )

    def to_census(self) -> Census:
        self.validate()
        census = Census(self.params)
        st = census._state
        st[K.C_POSITION] = self.position
        st[K.C_COUNT_R], st[K.C_COUNT_S] = self.counts
        st[K.C_NEXT_DECADE] = self.decade
        if self.deviation is not None:
            st[K.C_DEV_NUM] = self.deviation.numerator
            st[K.C_DEV_DEN] = self.deviation.denominator
        census.rows = list(self.rows)
        return census

    def restore(self) -> Tuple[KolakoskiEngine, Census]:
        return self.to_engine(), self.to_census()

    # serialisation

    def _fields(self) -> dict:
        dev = self.deviation
        return {
            "format_version": str(self.format_version),
            "r": str(self.params.r),
            "s": str(self.params.s),
            "counted_symbol": str(self.params.counted_symbol),
            "position": str(self.position),
            "prefix_emitted": self.prefix_emitted,
            "stack": [[str(x), str(y)] for x, y in self.stack],
            "count_r": str(self.counts[0]),
            "count_s": str(self.counts[1]),
            "decade": str(self.decade),
            "deviation_num": None if dev is None else str(dev.numerator),
            "deviation_den": None if dev is None else str(dev.denominator),
            "rows": [_row_to_json(row) for row in self.rows],
            "p": [str(x) for x in self.p],
            "a": [str(x) for x in self.a],
            "b": [str(x) for x in self.b],
        }

    def to_json(self) -> str:
        obj = self._fields()
        obj["digest"] = digest(obj)
        return json.dumps(obj, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CheckpointState":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCheckpointError(f"not a checkpoint: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedCheckpointError("checkpoint must be a JSON object")
        version = obj.get("format_version")
        if version != str(FORMAT_VERSION):
            raise FormatVersionError(
                f"unsupported checkpoint format version {version!r} (expected {FORMAT_VERSION})"
            )
        stored = obj.pop("digest", None)
        if stored != digest(obj):
            raise DigestMismatchError("checkpoint digest does not match its content")
        try:
            dev = None
            if obj["deviation_num"] is not None:
                dev = Deviation(int(obj["deviation_num"]), int(obj["deviation_den"]))
            state = cls(
                params=SequenceParams(int(obj["r"]), int(obj["s"]), int(obj["counted_symbol"])),
                position=int(obj["position"]),
                stack=[(int(x), int(y)) for x, y in obj["stack"]],
                prefix_emitted=bool(obj["prefix_emitted"]),
                counts=(int(obj["count_r"]), int(obj["count_s"])),
                decade=int(obj["decade"]),
                deviation=dev,
                rows=[_row_from_json(row) for row in obj["rows"]],
                p=[int(x) for x in obj["p"]],
                a=[int(x) for x in obj["a"]],
                b=[int(x) for x in obj["b"]],
                format_version=int(version),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvariantViolationError(f"bad checkpoint field: {exc}") from None
        state.validate()
        return state


def _row_to_json(row: DecadeRow) -> list:
    dev = row.deviation
    return [
        str(row.n),
        str(row.count),
        str(row.depth),
        None if dev is None else str(dev.numerator),
        None if dev is None else str(dev.denominator),
    ]


def _row_from_json(values) -> DecadeRow:
    n, count, depth, num, den = values
    dev = None if num is None else Deviation(int(num), int(den))
    return DecadeRow(int(n), int(count), int(depth), dev)


def digest(fields: dict) -> str:
    canonical = json.dumps(fields, separators=(",", ":"), ensure_ascii=True)
    return format(_crc64.checksum(canonical.encode("ascii")), "016x")


def snapshot(engine: KolakoskiEngine, census: Census) -> CheckpointState:
    return CheckpointState.capture(engine, census)


def save(checkpoint: CheckpointState, destination) -> None:
    """Write ``checkpoint`` atomically: a crash leaves either the old file or
    the new one, never a partial write."""
    path = os.fspath(destination)
    text = checkpoint.to_json()
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write(text)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise CheckpointIOError(f"cannot write checkpoint {path}: {exc}") from exc


def load(source) -> CheckpointState:
    path = os.fspath(source)
    try:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CheckpointIOError(f"cannot read checkpoint {path}: {exc}") from exc
    return CheckpointState.from_json(text)
