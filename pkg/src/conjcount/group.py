"""Free-group word algebra.

Letters are integers ``0 .. 2*rank-1``.  With the default involution letter
``2i`` is the i-th generator and ``2i+1`` its inverse; as strings they are
written ``a, A, b, B, ...`` (capital = inverse).  Words are plain tuples of
letters; every public function returns freely reduced tuples.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import UsageError

Word = tuple

IDENTITY: Word = ()


def letter_names(rank: int) -> list[str]:
    names = []
    for i in range(rank):
        c = string.ascii_lowercase[i]
        names += [c, c.upper()]
    return names


@dataclass(frozen=True)
class GeneratorSet:
    """A symmetric generating set of size ``2*rank``.

    ``order`` lists the letters in increasing order (used by the shortlex
    order); ``involution[x]`` is the letter inverse to ``x``.
    """

    rank: int
    order: tuple = None
    involution: tuple = None

    def __post_init__(self):
        if self.rank < 1:
            raise UsageError("rank must be positive")
        n = 2 * self.rank
        if self.involution is None:
            object.__setattr__(self, "involution", tuple(x ^ 1 for x in range(n)))
        if self.order is None:
            object.__setattr__(self, "order", tuple(range(n)))
        inv = self.involution
        if sorted(inv) != list(range(n)) or any(inv[inv[x]] != x or inv[x] == x for x in range(n)):
            raise UsageError("involution must be a fixed-point-free involution on the letters")
        if sorted(self.order) != list(range(n)):
            raise UsageError("order must be a permutation of the letters")
        object.__setattr__(self, "_rank_of", {x: i for i, x in enumerate(self.order)})

    @property
    def size(self) -> int:
        return 2 * self.rank

    @property
    def letters(self) -> range:
        return range(2 * self.rank)

    @property
    def names(self) -> list[str]:
        return letter_names(self.rank)

    def inv(self, x: int) -> int:
        return self.involution[x]

    def key(self, x: int) -> int:
        """Position of letter ``x`` in the generator order."""
        return self._rank_of[x]

    def check(self, letters: Iterable[int]) -> None:
        for x in letters:
            if not (isinstance(x, int) and 0 <= x < 2 * self.rank):
                raise UsageError(f"invalid generator index {x!r}")

    # -- serialisation -------------------------------------------------

    def parse(self, text: str) -> Word:
        """Parse ``'abAB'`` into a reduced word.  Capital letters are inverses."""
        names = self.names
        lookup = {c: i for i, c in enumerate(names)}
        letters = []
        for c in text.strip():
            if c.isspace():
                continue
            if c not in lookup:
                raise UsageError(f"unknown letter {c!r} for rank {self.rank}")
            letters.append(lookup[c])
        return reduce_word(self, letters)

    def format(self, word: Sequence[int]) -> str:
        names = self.names
        return "".join(names[x] for x in word)


def reduce_word(gens: GeneratorSet, letters: Iterable[int]) -> Word:
    """Free reduction by a single stack pass."""
    inv = gens.involution
    out: list[int] = []
    for x in letters:
        if not (isinstance(x, int) and 0 <= x < len(inv)):
            raise UsageError(f"invalid generator index {x!r}")
        if out and out[-1] == inv[x]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(gens: GeneratorSet, word: Sequence[int]) -> bool:
    inv = gens.involution
    return all(word[i + 1] != inv[word[i]] for i in range(len(word) - 1))


def invert(gens: GeneratorSet, word: Sequence[int]) -> Word:
    inv = gens.involution
    return tuple(inv[x] for x in reversed(word))


def multiply(gens: GeneratorSet, *words: Sequence[int]) -> Word:
    """Product of the words, freely reduced (inputs need not be reduced)."""
    return reduce_word(gens, (x for w in words for x in w))


def conjugate(gens: GeneratorSet, h: Sequence[int], g: Sequence[int]) -> Word:
    """``h^-1 g h``."""
    return multiply(gens, invert(gens, h), g, h)


def cyclic_reduce(gens: GeneratorSet, g: Sequence[int]) -> tuple[Word, Word]:
    """Split reduced ``g`` as ``conjugator * core * conjugator^-1``.

    ``core`` is cyclically reduced: its first and last letters are not
    mutually inverse.
    """
    g = tuple(g)
    inv = gens.involution
    i, j = 0, len(g) - 1
    while i < j and g[i] == inv[g[j]]:
        i += 1
        j -= 1
    return g[i : j + 1], g[:i]


def primitive_root(gens: GeneratorSet, core: Sequence[int]) -> tuple[Word, int]:
    core = tuple(core)
    if not core:
        raise UsageError("the identity has a finite conjugacy class; no primitive root")
    n = len(core)
    for d in range(1, n + 1):
        if n % d == 0 and core[:d] * (n // d) == core:
            return core[:d], n // d
    raise AssertionError("unreachable")


def shortlex_key(gens: GeneratorSet, word: Sequence[int]) -> tuple:
    return (len(word), tuple(gens.key(x) for x in word))


def shortlex_less(gens: GeneratorSet, u: Sequence[int], v: Sequence[int]) -> bool:
    return shortlex_key(gens, u) < shortlex_key(gens, v)


@dataclass(frozen=True)
class ConjugacyData:
    """``g = conjugator * root**power * conjugator^-1`` with ``root`` primitive.

    The centraliser of ``g`` is ``conjugator <root> conjugator^-1``.
    """

    word: Word
    core: Word
    conjugator: Word
    root: Word
    power: int

    @classmethod
    def of(cls, gens: GeneratorSet, g: Sequence[int]) -> "ConjugacyData":
        g = reduce_word(gens, g)
        core, conj = cyclic_reduce(gens, g)
        root, power = primitive_root(gens, core)
        return cls(g, core, conj, root, power)

    def centraliser_element(self, gens: GeneratorSet, k: int) -> Word:
        """``conjugator * root**k * conjugator^-1``."""
        base = self.root if k >= 0 else invert(gens, self.root)
        return multiply(gens, self.conjugator, base * abs(k), invert(gens, self.conjugator))

    def centraliser(self, gens: GeneratorSet, max_len: int) -> list[Word]:
        """All centraliser elements of word length at most ``max_len``."""
        out = [()]
        k = 1
        while True:
            grew = False
            for z in (self.centraliser_element(gens, k), self.centraliser_element(gens, -k)):
                if len(z) <= max_len:
                    out.append(z)
                    grew = True
            if not grew:
                return out
            k += 1

    def commutes(self, gens: GeneratorSet, h: Sequence[int]) -> bool:
        return multiply(gens, h, self.word) == multiply(gens, self.word, h)


def reduced_words(gens: GeneratorSet, length: int) -> Iterator[Word]:
    """Reduced words of exactly ``length`` letters, in shortlex order."""
    inv = gens.involution
    order = gens.order

    def extend(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for x in order:
            if prefix and x == inv[prefix[-1]]:
                continue
            yield from extend(prefix + (x,))

    yield from extend(())


def reduced_words_upto(gens: GeneratorSet, max_len: int) -> Iterator[Word]:
    for n in range(max_len + 1):
        yield from reduced_words(gens, n)


def all_words(gens: GeneratorSet, length: int) -> Iterator[Word]:
    """Every (not necessarily reduced) word of the given length."""
    return itertools.product(gens.letters, repeat=length)
