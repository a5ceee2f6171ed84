"""Label words over {0,1,2} that avoid the factors 02 and 20.

A dominating-set computation on a grid strip is summarised along a cut by
one letter per cut vertex: 0 means the vertex is in the set, 1 means it is
dominated but not in the set, 2 means it is (so far) undominated.  Two
vertices of the grid that are adjacent can never be labelled 0 and 2, so
every cut reads as a word with no 02 or 20 factor.  This module owns that
state space: counting, enumeration in lexicographic order, ranking, the
compatibility relation between words facing each other across a cut, the
pairwise overlap loss, and the gluing matrix assembled from both.

The number of valid length-k words satisfies a(k) = 2 a(k-1) + a(k-2) with
a(0) = 1, a(1) = 3, i.e. 3, 7, 17, 41, ... and a(10) = 8119.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_WORD_LEN = 16

__all__ = [
    "MAX_WORD_LEN",
    "Word",
    "WordTable",
    "word_count",
    "enumerate_words",
    "is_valid_word",
    "compatible",
    "overlap_loss",
    "gluing_matrix",
]


def _check_len(k):
    if not 1 <= k <= MAX_WORD_LEN:
        raise ValueError(f"word length must be in 1..{MAX_WORD_LEN}, got {k}")


def word_count(k: int) -> int:
    """Number of length-k words over {0,1,2} with no 02/20 factor.

    Evaluated by the integer recurrence a(k) = 2 a(k-1) + a(k-2), which is
    exact for every supported k (no floating point).
    """
    _check_len(k)
    a, b = 1, 3  # a(0), a(1)
    for _ in range(k - 1):
        a, b = b, 2 * b + a
    return b


def is_valid_word(letters) -> bool:
    """True iff no adjacent pair of letters is {0, 2}."""
    return all(
        ls + letters[i + 1] != 2 or ls == letters[i + 1]
        for i, ls in enumerate(letters[:-1])
    )


@dataclass(frozen=True)
class Word:
    """An immutable validated word; ``letters`` is a tuple of 0/1/2."""

    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("empty word")
        if any(a not in (0, 1, 2) for a in self.letters):
            raise ValueError(f"letters must be 0/1/2: {self.letters}")
        if not is_valid_word(self.letters):
            raise ValueError(f"word contains a 02/20 factor: {self.letters}")

    @property
    def k(self):
        return len(self.letters)

    def count(self, letter) -> int:
        return self.letters.count(letter)

    def packed(self) -> int:
        """Base-4 packing, 2 bits per letter, first letter in the low bits."""
        x = 0
        for i, a in enumerate(self.letters):
            x |= a << (2 * i)
        return x

    def __str__(self):
        return "".join(map(str, self.letters))

    @classmethod
    def from_string(cls, s: str) -> "Word":
        return cls(tuple(int(c) for c in s))


class WordTable:
    """All valid words of one length, in lexicographic order, with ranks.

    The rank of a word is its position in the lexicographic enumeration;
    this is the stable index used for every matrix in the pipeline and in
    cache files.  ``letters`` exposes the whole table as an (N, k) uint8
    array for vectorised matrix construction.
    """

    def __init__(self, k: int):
        _check_len(k)
        self.k = k
        self.words = tuple(Word(ls) for ls in _enumerate_letters(k))
        self.rank = {w.letters: i for i, w in enumerate(self.words)}
        self.letters = np.array([w.letters for w in self.words], dtype=np.uint8)
        if len(self.words) != word_count(k):
            raise AssertionError("enumeration disagrees with the closed form")

    def __len__(self):
        return len(self.words)

    def __getitem__(self, i) -> Word:
        return self.words[i]

    def rank_of(self, w: Word) -> int:
        return self.rank[w.letters]


def _enumerate_letters(k):
    """Lexicographic generation, pruning 02/20 as the word grows."""
    out = []

    def extend(prefix):
        if len(prefix) == k:
            out.append(prefix)
            return
        last = prefix[-1] if prefix else None
        for a in (0, 1, 2):
            if last is not None and last + a == 2 and last != a:
                continue
            extend(prefix + (a,))

    extend(())
    return out


_TABLE_CACHE: dict = {}


def enumerate_words(k: int) -> WordTable:
    """The (cached, immutable) table of all valid length-k words."""
    if k not in _TABLE_CACHE:
        _TABLE_CACHE[k] = WordTable(k)
    return _TABLE_CACHE[k]


def _check_same_len(w: Word, w2: Word):
    if w.k != w2.k:
        raise ValueError(f"length mismatch: {w.k} vs {w2.k}")


def compatible(w: Word, w2: Word) -> bool:
    """Whether two words may face each other across a gluing cut.

    Letter sums must stay at most 2 at every index except the last.  The
    final index is the one adjacent to the grid interior, where vertices
    may be dominated from outside the border, so it is exempt.
    """
    _check_same_len(w, w2)
    return all(a + b <= 2 for a, b in zip(w.letters[:-1], w2.letters[:-1]))


def overlap_loss(w: Word, w2: Word) -> int:
    """Size of the overlap N[D] ∩ N[D'] read off the two facing words.

    Counts indices where one side has a set vertex (letter 0) and the
    facing vertex is dominated (letter != 2), in both directions; this is
    exactly the double-covered region between two glued border pieces.
    """
    _check_same_len(w, w2)
    a, b = w.letters, w2.letters
    return sum(x != 2 and y == 0 for x, y in zip(a, b)) + sum(
        y != 2 and x == 0 for x, y in zip(a, b)
    )


def gluing_matrix(table: WordTable):
    """Square matrix over the table: overlap loss, or +inf if incompatible.

    Returned as a tropical matrix (see :mod:`griddom.tropical`); symmetric
    because both the compatibility relation and the overlap are.
    """
    from .tropical import INF, TropicalMatrix

    ls = table.letters.astype(np.int64)
    k = table.k
    head = ls[:, : k - 1]  # compatibility ignores the interior-facing index

    def pairs(left, right):
        return left.astype(np.int64) @ right.astype(np.int64).T

    viol = pairs(head == 2, head != 0) + pairs(head != 0, head == 2)
    loss = pairs(ls != 2, ls == 0) + pairs(ls == 0, ls != 2)
    entries = np.where(viol > 0, INF, loss)
    return TropicalMatrix(entries)
