"""Free group words over a finite basis.

Letters are nonzero signed integers: ``i`` stands for the generator x_i and
``-i`` for its inverse.  Text form uses ``a..z`` / ``A..Z`` for ranks up to
26 and ``x27`` / ``X27`` tokens beyond that; whitespace is ignored.
Conjugation follows ``h^g = g^-1 h g``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInput

_TOKEN = re.compile(r"\s*(?:([xX])(\d+)|([a-zA-Z]))")


@dataclass(frozen=True)
class Alphabet:
    rank: int

    def __post_init__(self) -> None:
        if not isinstance(self.rank, int) or self.rank < 1:
            raise InvalidInput(f"rank must be a positive integer, got {self.rank!r}")

    def letters(self) -> tuple[int, ...]:
        """All 2n signed letters, positive first."""
        return tuple(range(1, self.rank + 1)) + tuple(-i for i in range(1, self.rank + 1))


@dataclass(frozen=True)
class ReducedWord:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self) -> None:
        for i, x in enumerate(self.letters):
            if x == 0 or abs(x) > self.rank:
                raise InvalidInput(f"letter {x} out of range for rank {self.rank}")
            if i and self.letters[i - 1] == -x:
                raise InvalidInput("word is not freely reduced")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def __invert__(self) -> "ReducedWord":
        return inverse(self)

    def __str__(self) -> str:
        return format_word(self)


def reduce(raw: Iterable[int], alphabet: Alphabet | int) -> ReducedWord:
    """Free reduction with a stack; rejects letters outside the alphabet."""
    rank = alphabet if isinstance(alphabet, int) else alphabet.rank
    out: list[int] = []
    for x in raw:
        if x == 0 or abs(x) > rank:
            raise InvalidInput(f"letter {x} out of range for rank {rank}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return ReducedWord(tuple(out), rank)


def identity(rank: int) -> ReducedWord:
    return ReducedWord((), rank)


def inverse(w: ReducedWord) -> ReducedWord:
    return ReducedWord(tuple(-x for x in reversed(w.letters)), w.rank)


def multiply(*words: ReducedWord) -> ReducedWord:
    if not words:
        raise InvalidInput("multiply needs at least one word")
    rank = words[0].rank
    if any(w.rank != rank for w in words):
        raise InvalidInput("words over different alphabets")
    return reduce((x for w in words for x in w.letters), rank)


def conjugate(h: ReducedWord, g: ReducedWord) -> ReducedWord:
    """Return h^g = g^-1 h g."""
    return multiply(inverse(g), h, g)


def length(w: ReducedWord) -> int:
    return len(w.letters)


def cyclic_reduce(w: ReducedWord) -> tuple[ReducedWord, ReducedWord]:
    """Split w = c * core * c^-1 with core cyclically reduced."""
    xs = w.letters
    i, j = 0, len(xs)
    while j - i >= 2 and xs[i] == -xs[j - 1]:
        i += 1
        j -= 1
    return ReducedWord(xs[i:j], w.rank), ReducedWord(xs[:i], w.rank)


def is_cyclically_reduced(w: ReducedWord) -> bool:
    return len(w.letters) < 2 or w.letters[0] != -w.letters[-1]


def cyclic_canonical(w: ReducedWord) -> tuple[int, ...]:
    """Representative of w's class under cyclic rotation and inversion.

    Expects a cyclically reduced word.  Used to dedupe the finite list of
    short relators a girth-bounded cover must avoid.
    """
    xs = w.letters
    if not xs:
        return ()
    inv = tuple(-x for x in reversed(xs))
    rots = [s[k:] + s[:k] for s in (xs, inv) for k in range(len(s))]
    return min(rots)


def _letter_token(x: int, rank: int) -> str:
    i = abs(x)
    if rank <= 26:
        c = chr(ord("a") + i - 1)
        return c if x > 0 else c.upper()
    return f"x{i}" if x > 0 else f"X{i}"


def format_word(w: ReducedWord) -> str:
    sep = "" if w.rank <= 26 else " "
    return sep.join(_letter_token(x, w.rank) for x in w.letters)


def parse_letters(text: str, rank: int) -> list[int]:
    out: list[int] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise InvalidInput(f"cannot parse word {text!r} at position {pos}")
        if m.group(1):
            i = int(m.group(2))
            out.append(i if m.group(1) == "x" else -i)
        else:
            c = m.group(3)
            if rank > 26:
                raise InvalidInput("use x<i>/X<i> tokens for ranks above 26")
            i = ord(c.lower()) - ord("a") + 1
            out.append(i if c.islower() else -i)
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse_word(text: str, rank: int) -> ReducedWord:
    """Parse and freely reduce, e.g. ``parse_word("a b B a", 2)`` is ``aa``."""
    return reduce(parse_letters(text, rank), rank)


def parse_word_list(text: str, rank: int) -> list[ReducedWord]:
    """Comma separated words; an empty string is the empty list."""
    parts = [p for p in text.split(",") if p.strip()]
    return [parse_word(p, rank) for p in parts]


def reduced_words(rank: int, max_len: int, min_len: int = 0) -> Iterator[ReducedWord]:
    """All reduced words with min_len <= length <= max_len, shortest first."""
    letters = Alphabet(rank).letters()
    for n in range(min_len, max_len + 1):
        if n == 0:
            yield identity(rank)
            continue
        for first in letters:
            yield from _extend((first,), n, letters, rank)


def _extend(prefix: tuple[int, ...], n: int, letters: Sequence[int], rank: int) -> Iterator[ReducedWord]:
    if len(prefix) == n:
        yield ReducedWord(prefix, rank)
        return
    for x in letters:
        if x != -prefix[-1]:
            yield from _extend(prefix + (x,), n, letters, rank)


def cyclic_relator_classes(rank: int, max_len: int) -> list[tuple[int, ...]]:
    """Canonical forms of nontrivial cyclically reduced words of length <= max_len."""
    seen: set[tuple[int, ...]] = set()
    for w in reduced_words(rank, max_len, min_len=1):
        if is_cyclically_reduced(w):
            seen.add(cyclic_canonical(w))
    return sorted(seen, key=lambda t: (len(t), t))


def random_word(rng, rank: int, max_len: int, min_len: int = 0) -> ReducedWord:
    """Uniform length, then a uniformly random reduced word of that length."""
    n = rng.randint(min_len, max_len)
    letters = Alphabet(rank).letters()
    xs: list[int] = []
    while len(xs) < n:
        x = rng.choice(letters)
        if xs and xs[-1] == -x:
            continue
        xs.append(x)
    return ReducedWord(tuple(xs), rank)


__all__ = [
    "Alphabet",
    "ReducedWord",
    "reduce",
    "identity",
    "inverse",
    "multiply",
    "conjugate",
    "length",
    "cyclic_reduce",
    "is_cyclically_reduced",
    "cyclic_canonical",
    "format_word",
    "parse_word",
    "parse_word_list",
    "reduced_words",
    "cyclic_relator_classes",
    "random_word",
]
