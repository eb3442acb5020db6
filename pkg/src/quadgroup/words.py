"""Free-group arithmetic on reduced words.

Letters are signed integers: generator ``i`` is ``+i`` and its inverse ``-i``
(``i >= 1``).  In text, generators 1..26 render as ``a..z`` and their inverses
as ``A..Z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence


class WordError(ValueError):
    """Malformed word input (bad syntax or generator out of range)."""


class Letter(NamedTuple):
    generator_index: int
    sign: int

    def __int__(self) -> int:
        return self.generator_index * self.sign


def letter_order(letter: int) -> int:
    """Sort key realising the fixed order a < A < b < B < ..."""
    return 2 * abs(letter) - (letter > 0)


class Word(tuple):
    """An immutable freely reduced word.

    Construct with :func:`reduce`, :func:`parse_word` or ``Word.from_reduced``
    when the letters are already known to be reduced.
    """

    __slots__ = ()

    @classmethod
    def from_reduced(cls, letters: Iterable[int]) -> "Word":
        return tuple.__new__(cls, letters)

    def __mul__(self, other):  # type: ignore[override]
        if not isinstance(other, tuple):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):  # type: ignore[override]
        if not isinstance(other, tuple):
            return NotImplemented
        return mul(other, self)

    def __invert__(self) -> "Word":
        return inverse(self)

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter(abs(x), 1 if x > 0 else -1) for x in self)

    def is_identity(self) -> bool:
        return not self


IDENTITY = Word.from_reduced(())


@dataclass(frozen=True)
class FreeGroupSpec:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise WordError(f"rank must be >= 1, got {self.rank}")


def _check_rank(letters: Sequence[int], rank: int | None) -> None:
    for x in letters:
        if x == 0 or (rank is not None and abs(x) > rank):
            raise WordError(f"generator index {abs(x)} out of range for rank {rank}")


def reduce(raw: Iterable[int | Letter], rank: int | None = None) -> Word:
    """Freely reduce a sequence of letters."""
    out: list[int] = []
    for x in raw:
        if isinstance(x, Letter):
            x = x.generator_index * x.sign
        if x == 0 or (rank is not None and abs(x) > rank):
            raise WordError(f"generator index {abs(x)} out of range for rank {rank}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return Word.from_reduced(out)


def mul(*words: Sequence[int]) -> Word:
    """Product of already-reduced words, cancelling only at the junctions."""
    out: list[int] = []
    for w in words:
        i = 0
        n = len(w)
        while i < n and out and out[-1] == -w[i]:
            out.pop()
            i += 1
        out.extend(w[i:] if i else w)
    return Word.from_reduced(out)


def inverse(w: Sequence[int]) -> Word:
    return Word.from_reduced(-x for x in reversed(w))


def power(w: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    out: Word = IDENTITY
    base = Word.from_reduced(w)
    while n:
        if n & 1:
            out = mul(out, base)
        base = mul(base, base)
        n >>= 1
    return out


def commutator(x: Sequence[int], y: Sequence[int]) -> Word:
    """[x, y] = x y x^-1 y^-1."""
    return mul(x, y, inverse(x), inverse(y))


def conjugate(w: Sequence[int], c: Sequence[int]) -> Word:
    """c w c^-1."""
    return mul(c, w, inverse(c))


def commutator_product(tup: Sequence[Sequence[int]]) -> Word:
    """[x1,y1]...[xg,yg] for a flat tuple (x1, y1, ..., xg, yg)."""
    if len(tup) % 2:
        raise WordError("commutator product needs an even number of entries")
    out: Word = IDENTITY
    for i in range(0, len(tup), 2):
        out = mul(out, commutator(tup[i], tup[i + 1]))
    return out


def square_product(tup: Sequence[Sequence[int]]) -> Word:
    """x1^2 ... xg^2."""
    out: Word = IDENTITY
    for x in tup:
        out = mul(out, x, x)
    return out


# --- text syntax -----------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z])\s*(?:\^\s*(-?\d+))?\s*")


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse ``abAB``, ``a b a^-1 b^-1``, ``a^3 B^-2``, ``1`` or ``""``."""
    s = text.strip()
    if s in ("", "1", "e"):
        return IDENTITY
    raw: list[int] = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise WordError(f"cannot parse word {text!r} at position {pos}")
        ch, exp = m.group(1), m.group(2)
        g = ord(ch.lower()) - ord("a") + 1
        sign = 1 if ch.islower() else -1
        k = int(exp) if exp is not None else 1
        if k < 0:
            sign, k = -sign, -k
        raw.extend([g * sign] * k)
        pos = m.end()
    return reduce(raw, rank)


def format_letter(x: int) -> str:
    if abs(x) > 26:
        raise WordError(f"generator {abs(x)} has no single-letter name")
    ch = chr(ord("a") + abs(x) - 1)
    return ch if x > 0 else ch.upper()


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(format_letter(x) for x in w)


# --- cyclic words ------------------------------------------------------------

def _min_rotation(w: Sequence[int]) -> tuple[int, ...]:
    n = len(w)
    if n == 0:
        return ()
    keyed = [letter_order(x) for x in w]
    best = 0
    for i in range(1, n):
        if keyed[i:] + keyed[:i] < keyed[best:] + keyed[:best]:
            best = i
    return tuple(w[best:]) + tuple(w[:best])


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word, compared by its minimal rotation."""

    letters: Word
    canonical_rotation_key: tuple[int, ...]

    @classmethod
    def of(cls, w: Sequence[int]) -> "CyclicWord":
        core, _ = _cyclic_core(w)
        return cls(core, _min_rotation(core))

    def __eq__(self, other):
        if not isinstance(other, CyclicWord):
            return NotImplemented
        return self.canonical_rotation_key == other.canonical_rotation_key

    def __hash__(self):
        return hash(self.canonical_rotation_key)

    def __len__(self):
        return len(self.letters)

    def unoriented_key(self) -> tuple[int, ...]:
        return min(
            self.canonical_rotation_key,
            _min_rotation(inverse(self.letters)),
            key=lambda k: [letter_order(x) for x in k],
        )

    def rotations(self) -> Iterator[Word]:
        w = self.letters
        for i in range(max(len(w), 1)):
            yield Word.from_reduced(w[i:] + w[:i])

    def __str__(self):
        return format_word(self.letters)


def _cyclic_core(w: Sequence[int]) -> tuple[Word, Word]:
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return Word.from_reduced(w[i : j + 1]), Word.from_reduced(w[:i])


def cyclic_reduce(w: Sequence[int]) -> tuple[CyclicWord, Word]:
    """Split w = c . core . c^-1 with core cyclically reduced; returns (core, c)."""
    core, c = _cyclic_core(w)
    return CyclicWord(core, _min_rotation(core)), c


def conjugacy_key(w: Sequence[int]) -> tuple[int, ...]:
    """Canonical key of the conjugacy class of w."""
    core, _ = _cyclic_core(w)
    return _min_rotation(core)


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return len(w) < 2 or w[0] != -w[-1]


def primitive_root(w: Sequence[int]) -> tuple[Word, int]:
    """Return (root, k) with w = root^k and k maximal."""
    if not w:
        raise ValueError("the identity has no primitive root")
    core, c = _cyclic_core(w)
    n = len(core)
    for p in range(1, n + 1):
        if n % p == 0 and core[:p] * (n // p) == tuple(core):
            return conjugate(core[:p], c), n // p
    raise AssertionError("unreachable")


def exponent_sums(w: Sequence[int], rank: int) -> tuple[int, ...]:
    sums = [0] * rank
    for x in w:
        if abs(x) > rank:
            raise WordError(f"generator index {abs(x)} out of range for rank {rank}")
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


def in_commutator_subgroup(w: Sequence[int]) -> bool:
    rank = max((abs(x) for x in w), default=1)
    return not any(exponent_sums(w, rank))


def enumerate_words(rank: int, max_length: int, min_length: int = 0) -> Iterator[Word]:
    """All reduced words of length min_length..max_length, by length then a < A < b < ..."""
    letters = sorted(
        [s * g for g in range(1, rank + 1) for s in (1, -1)], key=letter_order
    )
    for length in range(min_length, max_length + 1):
        yield from _words_of_length(letters, length)


def _words_of_length(letters: list[int], length: int) -> Iterator[Word]:
    if length == 0:
        yield IDENTITY
        return
    stack: list[int] = []

    def rec(depth: int) -> Iterator[Word]:
        for x in letters:
            if stack and stack[-1] == -x:
                continue
            stack.append(x)
            if depth + 1 == length:
                yield Word.from_reduced(stack)
            else:
                yield from rec(depth + 1)
            stack.pop()

    yield from rec(0)


def count_words(rank: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


class FreeGroup:
    """The free group of a given rank as a target group for homomorphisms."""

    kind = "free"

    def __init__(self, rank: int):
        self.spec = FreeGroupSpec(rank)
        self.rank = rank
        self.identity = IDENTITY

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self):
        return hash(("free", self.rank))

    def mul(self, *xs):
        return mul(*xs)

    def inv(self, x):
        return inverse(x)

    def is_identity(self, x) -> bool:
        return not x

    def length(self, x) -> int:
        return len(x)

    def first(self, x):
        return Word.from_reduced(x[:1])

    def last(self, x):
        return Word.from_reduced(x[-1:])

    def order_at_most_two(self, x) -> bool:
        return not x

    def parse(self, text) -> Word:
        if isinstance(text, (list, tuple)) and not isinstance(text, Word):
            raise WordError("free-group elements use word syntax")
        return parse_word(text, self.rank)

    def format(self, x) -> str:
        return format_word(x)

    def to_json(self, x):
        return format_word(x)

    def spec_json(self) -> dict:
        return {"type": "free", "rank": self.rank}

    def elements(self, max_length: int) -> Iterator[Word]:
        return enumerate_words(self.rank, max_length)
