"""Reference definitions for generalised Kolakoski sequences K(r, s).

Everything here is deliberately naive: prefixes are materialised in memory by
the classic read/append method.  These functions are the oracle the streaming
engine is checked against, so they must not share code with it.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

Word = List[int]

BRUTE_FORCE_CEILING = 10**8


class EmptyInputError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    """Requested prefix is longer than the configured brute-force ceiling."""


@dataclass(frozen=True)
class SequenceParams:
    """Identifies K(r, s): the sequence over ``{r, s}`` starting with ``r``.

    ``counted_symbol`` selects which symbol a census reports; it defaults to
    the smaller of the two.
    """

    r: int = 1
    s: int = 2
    counted_symbol: Optional[int] = None

    def __post_init__(self):
        for name in ("r", "s"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.r == self.s:
            raise ValueError(f"r and s must differ, got r = s = {self.r}")
        if self.counted_symbol is None:
            object.__setattr__(self, "counted_symbol", min(self.r, self.s))
        elif self.counted_symbol not in (self.r, self.s):
            raise ValueError(
                f"counted_symbol must be {self.r} or {self.s}, got {self.counted_symbol!r}"
            )

    @property
    def alphabet(self):
        return (self.r, self.s)

    @property
    def max_symbol(self):
        return max(self.r, self.s)

    @property
    def is_classical(self):
        return self.r == 1 and self.s == 2

    @property
    def row_start_symbol(self):
        # K(1, s) is walked as 1K' where K' starts with s; otherwise K(r, s) itself
        return self.s if self.r == 1 else self.r

    @property
    def has_prefix(self):
        return self.r == 1

    def other(self, symbol):
        return self.s if symbol == self.r else self.r


CLASSICAL = SequenceParams(1, 2)


def _check_size(n, ceiling):
    if n > ceiling:
        raise ResourceLimitError(
            f"word of length {n} exceeds the brute-force ceiling {ceiling}"
        )


def brute_prefix(params: SequenceParams, n: int, ceiling: int = BRUTE_FORCE_CEILING) -> Word:
    """First ``n`` symbols of K(r, s), by reading run lengths off the word
    being written."""
    if n < 1:
        raise EmptyInputError("prefix length must be at least 1")
    _check_size(n, ceiling)
    word: Word = []
    symbol = params.r
    i = 0
    while len(word) < n:
        # a run whose length symbol is not written yet describes itself
        length = word[i] if i < len(word) else symbol
        word.extend([symbol] * length)
        symbol = params.other(symbol)
        i += 1
    del word[n:]
    return word


def rl_decode(lengths: Sequence[int], start_symbol: int, params: Optional[SequenceParams] = None) -> Word:
    """Word whose k-th run has length ``lengths[k]``, symbols alternating from
    ``start_symbol``.

    Without ``params`` the alphabet is taken as ``{start_symbol, other}`` where
    ``other`` is the first length value differing from ``start_symbol``, or the
    classical partner (1 <-> 2) when none is present.
    """
    if len(lengths) == 0:
        raise EmptyInputError("lengths must be nonempty")
    if params is not None:
        if start_symbol not in params.alphabet:
            raise ValueError(f"start symbol {start_symbol} not in {params.alphabet}")
        other = params.other(start_symbol)
    else:
        other = next((x for x in lengths if x != start_symbol), 3 - start_symbol)
        if other < 1:
            raise ValueError(f"cannot infer the alphabet for start symbol {start_symbol}")
    word: Word = []
    symbol = start_symbol
    for length in lengths:
        if length < 1:
            raise ValueError(f"run lengths must be positive, got {length}")
        word.extend([symbol] * length)
        symbol = other if symbol == start_symbol else start_symbol
    return word


class RunLengths(NamedTuple):
    lengths: Word
    final_truncated: bool
    in_alphabet: Optional[bool]


def rl_encode(word: Sequence[int], params: Optional[SequenceParams] = None) -> RunLengths:
    """Run-length sequence of ``word``.

    The final run is flagged as possibly truncated when it is shorter than the
    largest symbol of the alphabet (``params``, or the largest symbol in
    ``word``).  ``in_alphabet`` says whether every complete run length lies in
    ``{r, s}``; it is None without ``params``.
    """
    if len(word) == 0:
        raise EmptyInputError("word must be nonempty")
    lengths: Word = []
    current = word[0]
    count = 0
    for x in word:
        if x == current:
            count += 1
        else:
            lengths.append(count)
            current = x
            count = 1
    lengths.append(count)
    largest = params.max_symbol if params is not None else max(word)
    truncated = lengths[-1] < largest
    in_alphabet = None
    if params is not None:
        complete = lengths[:-1] if truncated else lengths
        in_alphabet = all(length in params.alphabet for length in complete)
    return RunLengths(lengths, truncated, in_alphabet)


def fan_seed(params: SequenceParams) -> Word:
    if params.r == 1:
        # for K(1, 2) this is the familiar w_0 = 122
        return [1] + [params.s] * params.s
    return [params.r]


def fan_word(params: SequenceParams, k: int, ceiling: int = BRUTE_FORCE_CEILING) -> Word:
    """The k-th word of the Kolakoski fan, each word run-length decoding the
    previous one."""
    if k < 0:
        raise ValueError("fan level must be nonnegative")
    word = fan_seed(params)
    for _ in range(k):
        _check_size(sum(word), ceiling)
        word = rl_decode(word, word[0], params)
    return word
