"""A free group acting on one of the model spaces, with a fixed basepoint."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import group as fg
from .errors import UsageError
from .geometry import HalfPlane, Mobius, TreePoint, WeightedTree, ping_pong_check


@dataclass
class GroupSystem:
    """Free group ``gens`` acting on ``space``.

    For the half-plane, ``matrices[x]`` is the isometry of letter ``x``
    (inverse letters are filled in automatically).  For trees the action is
    left multiplication and the basepoint is the root vertex.
    """

    gens: fg.GeneratorSet
    space: HalfPlane | WeightedTree
    matrices: dict = field(default_factory=dict)
    basepoint: object = None

    def __post_init__(self):
        self._envelope = None
        if isinstance(self.space, WeightedTree):
            if self.basepoint is None:
                self.basepoint = TreePoint((), 0.0)
            if self.basepoint != TreePoint((), 0.0):
                raise UsageError("tree systems count from the root vertex")
            return
        if self.basepoint is None:
            self.basepoint = 1j
        self.basepoint = self.space.validate(self.basepoint)
        mats = {}
        for x, m in self.matrices.items():
            m = m if isinstance(m, Mobius) else Mobius.from_array(m)
            mats[x] = m
        for x in list(mats):
            y = self.gens.inv(x)
            if y in mats:
                if not (mats[x] @ mats[y]).close_to(Mobius.identity(), 1e-9):
                    raise UsageError(
                        f"matrices for {self.gens.names[x]} and {self.gens.names[y]} are not inverse"
                    )
            else:
                mats[y] = mats[x].inverse()
        missing = [x for x in self.gens.letters if x not in mats]
        if missing:
            raise UsageError(f"no matrix for letters {[self.gens.names[x] for x in missing]}")
        self.matrices = mats
        self._mat_array = np.array([mats[x].to_array() for x in self.gens.letters])

    @property
    def is_tree(self) -> bool:
        return isinstance(self.space, WeightedTree)

    @classmethod
    def tree(cls, gens: fg.GeneratorSet, weights: Mapping[int, float] | None = None) -> "GroupSystem":
        return cls(gens, WeightedTree(gens, weights))

    @classmethod
    def halfplane(cls, gens: fg.GeneratorSet, matrices: Mapping[int, object], basepoint=1j) -> "GroupSystem":
        return cls(gens, HalfPlane(), dict(matrices), basepoint)

    # -- group elements ----------------------------------------------------

    def element(self, word: Sequence[int]):
        """The isometry represented by ``word``."""
        if self.is_tree:
            return fg.reduce_word(self.gens, word)
        m = Mobius.identity()
        for x in word:
            m = m @ self.matrices[x]
        return m

    def orbit_point(self, word: Sequence[int]):
        return self.space.act(self.element(word), self.basepoint)

    def displacement(self, word: Sequence[int]) -> float:
        """``d(w . x0, x0)``."""
        if self.is_tree:
            return self.space.word_length(fg.reduce_word(self.gens, word))
        a, b, c, d = self.element(word).to_array().ravel()
        return float(self.displacement_of_matrices(a, b, c, d))

    def generator_displacement(self) -> float:
        return max(self.displacement((x,)) for x in self.gens.letters)

    def is_schottky(self) -> bool:
        if self.is_tree:
            return True
        return ping_pong_check(self.matrices, self.gens)

    # -- vectorised half-plane helpers -------------------------------------

    def letter_matrices(self) -> np.ndarray:
        return self._mat_array

    def displacement_of_matrices(self, a, b, c, d) -> np.ndarray:
        """``d(x0, M x0)`` for unimodular ``M = [[a, b], [c, d]]``, elementwise.

        After moving ``x0`` to ``i``, ``sinh(d/2) = |(a - d, b + c)| / 2``; this
        avoids the complex division whose imaginary part cancels for long words.
        """
        x, y = self.basepoint.real, self.basepoint.imag
        if x != 0.0 or y != 1.0:
            # conjugate by z -> (z - x) / y, which sends x0 to i
            a, b, c, d = (
                a - x * c,
                (b + (a - x * c) * x - d * x) / y,
                c * y,
                c * x + d,
            )
        return 2.0 * np.arcsinh(0.5 * np.hypot(a - d, b + c))

    def reduced_word_levels(self, max_len: int):
        """Yield ``(n, words, matrices)`` for all reduced words of each length ``n <= max_len``."""
        gens = self.gens
        words = [()]
        mats = np.eye(2)[None]
        yield 0, words, mats
        letter = self._mat_array if not self.is_tree else None
        for n in range(1, max_len + 1):
            new_words, src, xs = [], [], []
            for i, w in enumerate(words):
                for x in gens.order:
                    if w and x == gens.inv(w[-1]):
                        continue
                    new_words.append(w + (x,))
                    src.append(i)
                    xs.append(x)
            words = new_words
            if letter is not None:
                mats = np.einsum("kij,kjl->kil", mats[src], letter[xs])
            yield n, words, mats

    def length_envelope(self, max_len: int = 8, margin: float = 0.5) -> tuple:
        """Constants ``(s, c)`` with ``d(w x0, x0) >= s|w| - c`` for reduced ``w``.

        Exact on trees.  On the half-plane they are estimated from every word
        of length at most ``max_len`` and must be audited by the caller.
        """
        if self._envelope is not None and self._envelope[0] == (max_len, margin):
            return self._envelope[1]
        if self.is_tree:
            env = (min(self.space.weights), 0.0)
        else:
            mins = []
            for n, _, mats in self.reduced_word_levels(max_len):
                d = self.displacement_of_matrices(mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
                mins.append(float(d.min()))
            half = max_len // 2
            slope = (mins[max_len] - mins[half]) / (max_len - half)
            s = 0.9 * slope
            c = max(s * n - m for n, m in enumerate(mins)) + margin
            env = (s, c)
        self._envelope = ((max_len, margin), env)
        return env

    def periodic_length(self, word: Sequence[int]) -> float:
        """Translation length of the cyclic word: the length of its closed geodesic."""
        if self.is_tree:
            core, _ = fg.cyclic_reduce(self.gens, fg.reduce_word(self.gens, word))
            return self.space.word_length(core)
        return self.element(word).translation_length()
