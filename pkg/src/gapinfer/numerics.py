"""Exact rational arithmetic and reproducible randomness.

Every probability that feeds a decision or an oracle comparison in this
package is an exact rational (``fractions.Fraction``); floating point is
used only to format sampling summaries.  Randomness flows exclusively
through :class:`RandomStream`, a counter-based generator chosen so that a
(seed, stream index) pair yields the same bit sequence on every platform
and every run, which is what makes the statistical goldens in the test
suite reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Rational = Fraction

ZERO = Fraction(0)
HALF = Fraction(1, 2)
ONE = Fraction(1)


def rat(numerator: int, denominator: int = 1) -> Fraction:
    """Exact rational in canonical form (positive denominator, reduced)."""
    return Fraction(numerator, denominator)


def rat_add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def rat_mul(a: Fraction, b: Fraction) -> Fraction:
    return a * b


def rat_cmp(a: Fraction, b: Fraction) -> int:
    """Exact three-way comparison: -1, 0 or 1."""
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


def format_rational(value: Fraction) -> str:
    """Canonical wire form ``"num/den"`` (always with the denominator)."""
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer); normalizes to canonical form."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    # SplitMix64 finalizer: the documented, fixed bit mixer behind RandomStream.
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RandomStream:
    """Deterministic, seekable stream of fair bits.

    The stream is defined counter-style so replays are exact: word ``i`` of
    stream ``(seed, index)`` is ``mix64(key + (i + 1) * GOLDEN)`` with
    ``key = mix64(mix64(seed + GOLDEN) + GOLDEN * index)``, and bits are
    consumed most-significant first within each 64-bit word.  (The GOLDEN
    offsets keep every path clear of the mixer's zero fixed point, so even
    seed 0 produces a non-degenerate first word.)  Consequently the bit
    sequence depends only on (seed, index, position), never on call
    boundaries: two draws of 2 bits return the same bits as one draw of 4.

    A stream is meant to be consumed by a single caller; concurrent trials
    should each derive their own stream index.
    """

    __slots__ = ("master_seed", "stream_index", "_key", "_position")

    def __init__(self, master_seed: int, stream_index: int = 0):
        if stream_index < 0:
            raise ValueError("stream_index must be non-negative")
        self.master_seed = master_seed & _MASK64
        self.stream_index = stream_index
        seeded = _mix64((self.master_seed + _GOLDEN) & _MASK64)
        self._key = _mix64((seeded + _GOLDEN * stream_index) & _MASK64)
        self._position = 0  # bits consumed so far

    @property
    def position(self) -> int:
        return self._position

    def _word(self, i: int) -> int:
        return _mix64((self._key + (i + 1) * _GOLDEN) & _MASK64)

    def draw_bit(self) -> int:
        word_index, offset = divmod(self._position, 64)
        self._position += 1
        return (self._word(word_index) >> (63 - offset)) & 1

    def draw_bits(self, count: int) -> str:
        """Next ``count`` bits as a '0'/'1' string; advances the stream."""
        if count < 1:
            raise ValueError("count must be >= 1")
        out = []
        pos = self._position
        while count > 0:
            word_index, offset = divmod(pos, 64)
            take = min(count, 64 - offset)
            word = self._word(word_index)
            chunk = (word >> (64 - offset - take)) & ((1 << take) - 1)
            out.append(format(chunk, f"0{take}b"))
            pos += take
            count -= take
        self._position = pos
        return "".join(out)


def draw_index(stream: RandomStream, cumulative: Sequence[int], denominator: int) -> int:
    """Draw an index with exact probabilities ``(cum[j] - cum[j-1]) / denominator``.

    ``cumulative`` is the non-decreasing sequence of cumulative numerators
    ending at ``denominator``.  The draw refines a dyadic interval one bit
    at a time until it fits inside a single bucket, so the result is exact
    for arbitrary rational weights; the expected number of bits is constant
    (at most two beyond the entropy).  Zero-width buckets are never chosen,
    and a bucket of weight one resolves without consuming any bits.
    """
    if not cumulative or cumulative[-1] != denominator:
        raise ValueError("cumulative numerators must end at the denominator")
    c = 0  # interval [c / 2^t, (c+1) / 2^t)
    t = 0
    while True:
        # locate the bucket containing the interval's lower endpoint
        scaled = c * denominator
        j = 0
        while cumulative[j] << t <= scaled:
            j += 1
        if (c + 1) * denominator <= cumulative[j] << t:
            return j
        c = (c << 1) | stream.draw_bit()
        t += 1


def bernoulli(stream: RandomStream, p: Fraction) -> bool:
    """Exact biased coin: True with probability exactly ``p``."""
    if p < 0 or p > 1:
        raise ValueError("bias must lie in [0, 1]")
    if p == 0:
        return False
    if p == 1:
        return True
    return draw_index(stream, (p.numerator, p.denominator), p.denominator) == 0
