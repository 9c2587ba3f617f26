"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 argument error,
3 I/O or checkpoint error.  Reports go to stdout; progress lines (prefixed
``#``) go to stderr.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, List, Optional

import numpy as np

from .census import Census, DecadeRow, decade_rows, format_deviation, is_power_of_ten
from .engine import POSITION_LIMIT, KolakoskiEngine, symbol_chunks
from .persistence import CheckpointError, load, save, snapshot
from .sequence import ResourceLimitError, SequenceParams, brute_prefix

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_CHECKPOINT_EVERY = 10**9
PROGRESS_CHUNK = 10**8

OEIS = {
    (1, 2): {"sequence": "A000002", "counts": "A195206"},
    (2, 3): {"sequence": "A071820", "counts": "A195211"},
}


class UsageError(Exception):
    pass


def parse_count(text: str) -> int:
    """Positive integer, scientific notation allowed (``1e13``)."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value() or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


@dataclass(frozen=True)
class ReportRow:
    n: int
    count: int
    depth: int
    deviation: str

    @classmethod
    def from_decade(cls, row: DecadeRow) -> "ReportRow":
        dev = "" if row.deviation is None else format_deviation(row.deviation)
        return cls(row.n, row.count, row.depth, dev)


def render(rows: Iterable[DecadeRow], params: SequenceParams, fmt: str) -> str:
    report = [ReportRow.from_decade(row) for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "count", "depth", "deviation"])
        for row in report:
            writer.writerow([row.n, row.count, row.depth, row.deviation])
        return buf.getvalue()
    if fmt == "json":
        obj = {
            "params": {"r": params.r, "s": params.s, "counted_symbol": params.counted_symbol},
            "oeis": OEIS.get((params.r, params.s), {}),
            "rows": [
                {"n": r.n, "count": r.count, "depth": r.depth, "deviation": r.deviation or None}
                for r in report
            ],
        }
        return json.dumps(obj, indent=2) + "\n"
    header = ("n", f"count({params.counted_symbol})", "depth", "deviation")
    cells = [header] + [(str(r.n), str(r.count), str(r.depth), r.deviation) for r in report]
    widths = [max(len(c[i]) for c in cells) for i in range(4)]
    lines = ["  ".join(c[i].rjust(widths[i]) for i in range(4)).rstrip() for c in cells]
    return "\n".join(lines) + "\n"


def _params(args) -> SequenceParams:
    try:
        return SequenceParams(args.r, args.s, args.counted)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_limit(n):
    if n > POSITION_LIMIT:
        raise UsageError(f"n = {n} exceeds the supported limit {POSITION_LIMIT}")


def _drive(engine: KolakoskiEngine, census: Census, n_max: int, checkpoint: Optional[str],
           every: int, quiet: bool) -> List[DecadeRow]:
    """Stream to ``n_max`` in chunks, checkpointing and reporting progress."""
    stop = 0 if is_power_of_ten(n_max) else n_max
    rows: List[DecadeRow] = []
    if engine.initial_runs:
        rows += census.attach(engine, stop)
    started = time.monotonic()
    origin = engine.position
    next_ckpt = (engine.position // every + 1) * every
    while engine.position < n_max:
        target = min(n_max, next_ckpt, (engine.position // PROGRESS_CHUNK + 1) * PROGRESS_CHUNK)
        rows += census.consume(engine, target, stop=stop)
        if checkpoint and engine.position >= next_ckpt and engine.position < n_max:
            save(snapshot(engine, census), checkpoint)
            next_ckpt = (engine.position // every + 1) * every
        if not quiet and engine.position < n_max:
            elapsed = max(time.monotonic() - started, 1e-9)
            rate = (engine.position - origin) / elapsed
            print(f"# position {engine.position} depth {engine.depth} {rate:.3e} positions/s",
                  file=sys.stderr, flush=True)
    if checkpoint:
        save(snapshot(engine, census), checkpoint)
    return [row for row in rows if row.n <= n_max]


def cmd_census(args) -> int:
    params = _params(args)
    _check_limit(args.n)
    engine = KolakoskiEngine(params)
    census = Census(params)
    rows = _drive(engine, census, args.n, args.checkpoint, args.checkpoint_every, args.quiet)
    sys.stdout.write(render(rows, params, args.format))
    return EXIT_OK


def cmd_resume(args) -> int:
    _check_limit(args.n)
    state = load(args.checkpoint_path)
    if args.n <= state.position:
        raise UsageError(
            f"--n {args.n} must exceed the checkpoint position {state.position}"
        )
    engine, census = state.restore()
    rows = list(census.rows)
    rows += _drive(engine, census, args.n, args.checkpoint, args.checkpoint_every, args.quiet)
    rows = [row for row in rows if row.n <= args.n]
    sys.stdout.write(render(rows, state.params, args.format))
    return EXIT_OK


def _oracle_chunks(params, n, chunk=1 << 20):
    word = np.asarray(brute_prefix(params, n), dtype=np.int64)
    for i in range(0, n, chunk):
        yield word[i:i + chunk]


def cmd_generate(args) -> int:
    params = _params(args)
    chunks = _oracle_chunks(params, args.n) if args.mode == "oracle" else symbol_chunks(params, args.n)
    sep = "" if params.max_symbol <= 9 else ","
    out = sys.stdout
    first = True
    for chunk in chunks:
        text = sep.join(map(str, chunk.tolist()))
        if not first and sep:
            out.write(sep)
        out.write(text)
        first = False
    out.write("\n")
    return EXIT_OK


@dataclass
class VerifyResult:
    ok: bool
    checked: int
    first_mismatch: Optional[int] = None
    expected: Optional[int] = None
    found: Optional[int] = None
    count_mismatch: Optional[int] = None


def verify(params: SequenceParams, n: int,
           engine_stream: Optional[Callable[[SequenceParams, int], Iterable[np.ndarray]]] = None,
           census_rows: Optional[Callable[[SequenceParams, int], List[DecadeRow]]] = None) -> VerifyResult:
    """Compare the engine with the brute-force oracle, symbol by symbol and by
    counts at every power of ten."""
    engine_stream = engine_stream or symbol_chunks
    census_rows = census_rows or decade_rows
    oracle = np.asarray(brute_prefix(params, n), dtype=np.int64)
    i = 0
    for chunk in engine_stream(params, n):
        ref = oracle[i:i + len(chunk)]
        bad = np.flatnonzero(ref != chunk[:len(ref)])
        if bad.size:
            j = int(bad[0])
            return VerifyResult(False, n, i + j + 1, int(ref[j]), int(chunk[j]))
        i += len(chunk)
    if i != n:
        return VerifyResult(False, n, i + 1, int(oracle[i]) if i < n else None, None)
    cumulative = np.cumsum(oracle == params.counted_symbol)
    for row in census_rows(params, n):
        if row.count != int(cumulative[row.n - 1]):
            return VerifyResult(False, n, count_mismatch=row.n)
    return VerifyResult(True, n)


def cmd_verify(args) -> int:
    params = _params(args)
    result = verify(params, args.n)
    if result.ok:
        print(f"pass: K({params.r},{params.s}) engine matches the oracle on {args.n} symbols")
        return EXIT_OK
    if result.first_mismatch is not None:
        print(f"fail: first divergence at position {result.first_mismatch} "
              f"(oracle {result.expected}, engine {result.found})")
    else:
        print(f"fail: census count differs from the oracle at n = {result.count_mismatch}")
    return EXIT_MISMATCH


def cmd_profile(args) -> int:
    params = _params(args)
    _check_limit(args.n)
    engine = KolakoskiEngine(params)
    census = Census(params)
    rows = _drive(engine, census, args.n, None, DEFAULT_CHECKPOINT_EVERY, args.quiet)
    prof = engine.work_profile()
    runs = engine.runs_emitted
    out = [
        f"# work profile K({params.r},{params.s}) to position {engine.position}",
        f"runs {runs}",
        f"total_work {prof.total}",
        f"work_per_run {prof.total / runs:.6f}" if runs else "work_per_run nan",
        f"work_per_position {prof.total / engine.position:.6f}",
        f"depth {engine.depth}",
        "level p a b ratio",
    ]
    for k in range(len(prof.p)):
        ratio = f"{prof.p[k + 1] / prof.p[k]:.6f}" if k + 1 < len(prof.p) and prof.p[k] else ""
        out.append(f"{k} {prof.p[k]} {prof.a[k]} {prof.b[k]} {ratio}".rstrip())
    out.append("n depth")
    out.extend(f"{row.n} {row.depth}" for row in rows)
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def _add_params(p):
    p.add_argument("--r", type=int, default=1, help="first symbol (the sequence starts with it)")
    p.add_argument("--s", type=int, default=2, help="second symbol")
    p.add_argument("--counted", type=int, default=None,
                   help="symbol to census (default: the smaller one)")


def _add_run_options(p):
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--checkpoint", metavar="PATH", help="write checkpoints to PATH")
    p.add_argument("--checkpoint-every", type=parse_count, default=DEFAULT_CHECKPOINT_EVERY,
                   metavar="N", help="positions between checkpoints (default 1e9)")
    p.add_argument("--quiet", action="store_true", help="no progress lines on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kolakoski",
        description="Stream and census (generalised) Kolakoski sequences in logarithmic space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="counts, depth and deviation at every power of ten")
    _add_params(p)
    p.add_argument("--n", type=parse_count, required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("resume", help="continue a census from a checkpoint file")
    p.add_argument("checkpoint_path", metavar="CHECKPOINT")
    p.add_argument("--n", type=parse_count, required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("generate", help="print the first n symbols")
    _add_params(p)
    p.add_argument("--n", type=parse_count, required=True)
    p.add_argument("--mode", choices=("oracle", "engine"), default="engine")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="cross-check the engine against the brute-force oracle")
    _add_params(p)
    p.add_argument("--n", type=parse_count, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("profile", help="per-level work counters of the cursor engine")
    _add_params(p)
    p.add_argument("--n", type=parse_count, required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kolakoski: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"kolakoski: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CheckpointError, OSError) as exc:
        print(f"kolakoski: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
