"""Exact arithmetic in BS(1,n) = <a, b | a b a^-1 = b^n>.

Every element has a unique normal form ``a^-p b^q a^r`` with ``p, r >= 0`` and,
whenever both ``p`` and ``r`` are positive, ``n`` not dividing ``q``.  The
b-exponent ``q`` is a Python int, so the exponential growth of conjugates
``a^m b a^-m = b^(n^m)`` is tracked exactly.

Words are tuples of :class:`Generator`; the compact string form uses ``a``,
``A`` (= a^-1), ``b`` and ``B`` (= b^-1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Generator",
    "Word",
    "NormalForm",
    "identity",
    "parse_word",
    "format_word",
    "inverse_word",
    "normalize",
    "multiply",
    "invert",
    "power",
    "distortion_word",
    "horner_word",
    "distortion_length",
]


class Generator(enum.Enum):
    a = "a"
    A = "A"
    b = "b"
    B = "B"

    @property
    def inverse(self) -> Generator:
        return _INVERSE[self]


_INVERSE = {
    Generator.a: Generator.A,
    Generator.A: Generator.a,
    Generator.b: Generator.B,
    Generator.B: Generator.b,
}

Word = tuple  # tuple[Generator, ...]


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"group parameter n must be an integer >= 2, got {n!r}")


@dataclass(frozen=True)
class NormalForm:
    """The element ``a^-p b^q a^r`` of BS(1,n)."""

    p: int
    q: int
    r: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if self.p < 0 or self.r < 0:
            raise ValueError(f"a-exponents must be non-negative: p={self.p}, r={self.r}")
        if self.p > 0 and self.r > 0 and self.q % self.n == 0:
            raise ValueError(
                f"not reduced: n={self.n} divides q={self.q} with p, r > 0"
            )

    @property
    def is_identity(self) -> bool:
        return self.p == 0 and self.q == 0 and self.r == 0

    @property
    def is_b_power(self) -> bool:
        return self.p == 0 and self.r == 0

    def __str__(self) -> str:
        parts = []
        if self.p:
            parts.append(f"a^-{self.p}")
        if self.q:
            parts.append(f"b^{self.q}")
        if self.r:
            parts.append(f"a^{self.r}")
        return " ".join(parts) if parts else "1"

    def __mul__(self, other: NormalForm) -> NormalForm:
        return multiply(self, other)

    def to_word(self) -> Word:
        """A word representing this element (not geodesic in general)."""
        letter = Generator.b if self.q >= 0 else Generator.B
        return (
            (Generator.A,) * self.p
            + (letter,) * abs(self.q)
            + (Generator.a,) * self.r
        )


def identity(n: int) -> NormalForm:
    return NormalForm(0, 0, 0, n)


def parse_word(text: str) -> Word:
    """Parse a compact word such as ``"aabAA"``; whitespace is ignored."""
    letters = []
    for ch in text:
        if ch.isspace():
            continue
        try:
            letters.append(Generator(ch))
        except ValueError:
            raise ValueError(f"invalid letter {ch!r} in word {text!r}") from None
    return tuple(letters)


def format_word(word: Iterable[Generator]) -> str:
    return "".join(g.value for g in word)


def inverse_word(word: Sequence[Generator]) -> Word:
    return tuple(g.inverse for g in reversed(word))


def _reduce(p: int, q: int, r: int, n: int) -> NormalForm:
    # a^-1 b^(nq) a -> b^q, applied while both a-exponents are positive
    if q == 0:
        k = min(p, r)
        return NormalForm(p - k, 0, r - k, n)
    while p > 0 and r > 0 and q % n == 0:
        p, q, r = p - 1, q // n, r - 1
    return NormalForm(p, q, r, n)


def _append(x: NormalForm, g: Generator) -> NormalForm:
    p, q, r, n = x.p, x.q, x.r, x.n
    if g is Generator.a:
        return _reduce(p, q, r + 1, n)
    if g is Generator.A:
        if r > 0:
            return NormalForm(p, q, r - 1, n)
        # b^q a^-1 = a^-1 (a b^q a^-1) = a^-1 b^(nq)
        return NormalForm(p + 1, q * n, 0, n)
    # b^q a^r b^{+-1} = b^(q +- n^r) a^r
    step = n**r if g is Generator.b else -(n**r)
    return _reduce(p, q + step, r, n)


def normalize(word: Iterable[Generator], n: int) -> NormalForm:
    """Rewrite ``word`` into its normal form in BS(1,n)."""
    _check_n(n)
    x = identity(n)
    for g in word:
        x = _append(x, g)
    return x


def multiply(x: NormalForm, y: NormalForm) -> NormalForm:
    if x.n != y.n:
        raise ValueError(f"cannot multiply elements of BS(1,{x.n}) and BS(1,{y.n})")
    n = x.n
    # a^-p1 b^q1 a^r1 . a^-p2 b^q2 a^r2
    if x.r >= y.p:
        shift = x.r - y.p
        return _reduce(x.p, x.q + y.q * n**shift, shift + y.r, n)
    shift = y.p - x.r
    return _reduce(x.p + shift, x.q * n**shift + y.q, y.r, n)


def invert(x: NormalForm) -> NormalForm:
    return NormalForm(x.r, -x.q, x.p, x.n)


def power(x: NormalForm, k: int) -> NormalForm:
    """``x^k`` by repeated squaring; negative ``k`` allowed."""
    if k < 0:
        x, k = invert(x), -k
    result = identity(x.n)
    while k:
        if k & 1:
            result = multiply(result, x)
        x = multiply(x, x)
        k >>= 1
    return result


def distortion_word(m: int, n: int) -> Word:
    """The word ``a^m b a^-m``, of length 2m+1, representing ``b^(n^m)``."""
    _check_n(n)
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    return (Generator.a,) * m + (Generator.b,) + (Generator.A,) * m


def horner_word(q: int, n: int) -> Word:
    """A short word for ``b^q`` from the base-n digits of ``q``.

    Writing ``q = d0 + n*q1`` gives ``b^q = b^d0 a b^q1 a^-1``; unrolling yields a
    word of length ``sum(|d_i|) + 2*(#digits - 1)``, logarithmic in ``|q|``.
    """
    _check_n(n)
    letter = Generator.b if q >= 0 else Generator.B
    digits = []
    rest = abs(q)
    while rest:
        rest, d = divmod(rest, n)
        digits.append(d)
    if not digits:
        return ()
    k = len(digits) - 1
    head = []
    for i, d in enumerate(digits):
        head.extend([letter] * d)
        if i < k:
            head.append(Generator.a)
    return tuple(head) + (Generator.A,) * k


def distortion_length(q: int, n: int) -> int:
    """Length of :func:`horner_word`; equals 2m+1 when ``q = n^m``."""
    return len(horner_word(q, n))
