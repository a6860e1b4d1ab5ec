"""The two CAT(-1) model spaces: the upper half-plane and weighted Cayley trees.

Half-plane points are Python complex numbers with positive imaginary part and
isometries are :class:`Mobius` matrices.  Tree points are :class:`TreePoint`
values; tree isometries are reduced words acting by left multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import group as fg
from .errors import UsageError

# ---------------------------------------------------------------------------
# Half-plane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mobius:
    """A determinant-one real 2x2 matrix acting by ``z -> (az+b)/(cz+d)``.

    Construction rescales to determinant one and fixes the sign so that the
    first nonzero entry is positive; ``M`` and ``-M`` are therefore equal.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0:
            raise UsageError(f"matrix has non-positive determinant {det!r}")
        s = math.sqrt(det)
        entries = [self.a / s, self.b / s, self.c / s, self.d / s]
        first = next((x for x in entries if x != 0.0), 1.0)
        if first < 0:
            entries = [-x for x in entries]
        for name, x in zip("abcd", entries):
            object.__setattr__(self, name, x)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, m) -> "Mobius":
        m = np.asarray(m, dtype=float).reshape(2, 2)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def translation_length(self) -> float:
        """Translation length ``2 arccosh(|tr|/2)``; zero for non-hyperbolic matrices."""
        t = abs(self.trace) / 2.0
        return 2.0 * math.acosh(t) if t > 1.0 else 0.0

    def close_to(self, other: "Mobius", tol: float = 1e-9) -> bool:
        scale = max(1.0, max(abs(x) for x in (self.a, self.b, self.c, self.d)))
        return all(
            abs(x - y) <= tol * scale
            for x, y in zip((self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d))
        )


def _hyperbolic_distance(z: complex, w: complex) -> float:
    y1, y2 = z.imag, w.imag
    if not (y1 > 0 and y2 > 0):
        raise UsageError("half-plane points need positive imaginary part")
    num = abs(z - w)
    arg = num * num / (2.0 * y1 * y2)
    if arg < 1e-9:
        # arccosh(1+x) loses half the digits near x = 0
        return 2.0 * math.asinh(num / (2.0 * math.sqrt(y1 * y2)))
    return math.acosh(1.0 + arg)


def hyperbolic_distance_array(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorised half-plane distance, stable for nearby points."""
    num = np.abs(z - w)
    return 2.0 * np.arcsinh(num / (2.0 * np.sqrt(z.imag * w.imag)))


class HalfPlane:
    kind = "halfplane"

    def point(self, x: float, y: float) -> complex:
        if not y > 0:
            raise UsageError("half-plane points need positive imaginary part")
        return complex(x, y)

    def validate(self, p) -> complex:
        if isinstance(p, TreePoint) or not isinstance(p, (complex, float, int)):
            raise UsageError(f"{p!r} is not a half-plane point")
        p = complex(p)
        if not p.imag > 0:
            raise UsageError("half-plane points need positive imaginary part")
        return p

    def distance(self, p, q) -> float:
        return _hyperbolic_distance(self.validate(p), self.validate(q))

    def act(self, g: Mobius, p) -> complex:
        if not isinstance(g, Mobius):
            raise UsageError("half-plane isometries are Mobius matrices")
        return g(self.validate(p))

    def compose(self, g: Mobius, h: Mobius) -> Mobius:
        return g @ h

    def identity(self) -> Mobius:
        return Mobius.identity()

    def __repr__(self):
        return "HalfPlane()"


# ---------------------------------------------------------------------------
# Weighted Cayley tree of a free group
# ---------------------------------------------------------------------------


class TreePoint(NamedTuple):
    """A point at distance ``offset`` from vertex ``word`` towards its parent."""

    word: tuple
    offset: float = 0.0


class WeightedTree:
    """Cayley tree of a free group with edge lengths given per generator."""

    kind = "tree"

    def __init__(self, gens: fg.GeneratorSet, weights: Mapping[int, float] | None = None):
        self.gens = gens
        w = [1.0] * gens.size
        given = dict(weights or {})
        for x, val in given.items():
            w[x] = float(val)
            if gens.inv(x) not in given:
                w[gens.inv(x)] = float(val)
        for x in gens.letters:
            if not w[x] > 0:
                raise UsageError("tree weights must be positive")
            if w[x] != w[gens.inv(x)]:
                raise UsageError("tree weights must satisfy weight(a) == weight(a^-1)")
        self.weights = tuple(w[x] for x in gens.letters)

    def word_length(self, word: Sequence[int]) -> float:
        return math.fsum(self.weights[x] for x in word)

    def vertex(self, word: Sequence[int]) -> TreePoint:
        return TreePoint(fg.reduce_word(self.gens, word), 0.0)

    def point(self, word: Sequence[int], offset: float = 0.0) -> TreePoint:
        return self.validate(TreePoint(tuple(word), float(offset)))

    def validate(self, p) -> TreePoint:
        if not isinstance(p, TreePoint):
            raise UsageError(f"{p!r} is not a tree point")
        word = tuple(p.word)
        if not fg.is_reduced(self.gens, word):
            raise UsageError("tree points are addressed by reduced words")
        if p.offset == 0.0:
            return TreePoint(word, 0.0)
        if not word:
            raise UsageError("the root vertex has no parent edge")
        wlen = self.weights[word[-1]]
        if not 0.0 <= p.offset <= wlen:
            raise UsageError("offset lies outside its edge")
        if p.offset == wlen:
            return TreePoint(word[:-1], 0.0)
        return TreePoint(word, float(p.offset))

    def _vertex_distance(self, u, v) -> float:
        return self.word_length(fg.multiply(self.gens, fg.invert(self.gens, u), v))

    def distance(self, p, q) -> float:
        p, q = self.validate(p), self.validate(q)
        if p.offset == 0.0 and q.offset == 0.0:
            return self._vertex_distance(p.word, q.word)
        if p.word == q.word:
            return abs(p.offset - q.offset)

        def ends(pt):
            if pt.offset == 0.0:
                return [(pt.word, 0.0)]
            w = self.weights[pt.word[-1]]
            return [(pt.word, pt.offset), (pt.word[:-1], w - pt.offset)]

        return min(
            dp + self._vertex_distance(u, v) + dq for u, dp in ends(p) for v, dq in ends(q)
        )

    def act(self, g: Sequence[int], p) -> TreePoint:
        p = self.validate(p)
        g = tuple(g)
        child = fg.multiply(self.gens, g, p.word)
        if p.offset == 0.0:
            return TreePoint(child, 0.0)
        parent = fg.multiply(self.gens, g, p.word[:-1])
        if len(child) == len(parent) + 1:
            return TreePoint(child, p.offset)
        return TreePoint(parent, self.weights[p.word[-1]] - p.offset)

    def compose(self, g, h):
        return fg.multiply(self.gens, g, h)

    def identity(self):
        return ()

    def __repr__(self):
        return f"WeightedTree(rank={self.gens.rank}, weights={self.weights})"


ModelSpace = HalfPlane | WeightedTree

# ---------------------------------------------------------------------------
# Metric operations
# ---------------------------------------------------------------------------


def distance(space, p, q) -> float:
    return space.distance(p, q)


def gromov_product(space, base, y, z) -> float:
    """``(y, z)_base = (d(base,y) + d(base,z) - d(y,z)) / 2``."""
    return 0.5 * (space.distance(base, y) + space.distance(base, z) - space.distance(y, z))


def displacement(space, g, basepoint) -> float:
    return space.distance(basepoint, space.act(g, basepoint))


@dataclass(frozen=True)
class HyperbolicityAudit:
    """Outcome of the four-point exponential audit.

    ``max_violation`` is the largest raw defect
    ``|d(x,y)+d(z,t)-d(x,t)-d(z,y)|`` among used samples and ``fitted_L``
    the largest ``defect * exp(R)``.
    """

    max_violation: float
    fitted_L: float
    used: int
    skipped: int


def strong_hyperbolicity_audit(space, samples: Iterable[tuple], R0: float = 5.0) -> HyperbolicityAudit:
    max_violation = 0.0
    fitted = 0.0
    used = skipped = 0
    d = space.distance
    for x, y, z, t in samples:
        R = d(x, y) + d(z, t) - d(x, z) - d(y, t)
        if R < R0:
            skipped += 1
            continue
        used += 1
        defect = abs(d(x, y) + d(z, t) - d(x, t) - d(z, y))
        max_violation = max(max_violation, defect)
        fitted = max(fitted, defect * math.exp(R))
    return HyperbolicityAudit(max_violation, fitted, used, skipped)


def rotation_about_i(theta: float) -> Mobius:
    c, s = math.cos(theta), math.sin(theta)
    return Mobius(c, s, -s, c)


def polar_point(center: complex, radius: float, theta: float) -> complex:
    """The point at hyperbolic distance ``radius`` from ``center`` in direction ``theta``."""
    center = complex(center)
    to_center = Mobius(math.sqrt(center.imag), center.real / math.sqrt(center.imag), 0.0, 1.0 / math.sqrt(center.imag))
    return to_center(rotation_about_i(theta)(complex(0.0, math.exp(radius))))


def sample_halfplane_quadruples(rng: np.random.Generator, n: int, spread=(3.0, 8.0), jitter=1.0):
    """Quadruples ``(x, y, z, t)`` with ``x, z`` near one point and ``y, t`` near
    another, so that ``d(x,y) + d(z,t) - d(x,z) - d(y,t)`` is typically large."""
    out = []
    for _ in range(n):
        p = polar_point(1j, rng.uniform(0.0, 2.0), rng.uniform(0, 2 * math.pi))
        q = polar_point(p, rng.uniform(*spread), rng.uniform(0, 2 * math.pi))
        x, z = (polar_point(p, rng.uniform(0, jitter), rng.uniform(0, 2 * math.pi)) for _ in range(2))
        y, t = (polar_point(q, rng.uniform(0, jitter), rng.uniform(0, 2 * math.pi)) for _ in range(2))
        out.append((x, y, z, t))
    return out


def attracting_disc(m: Mobius) -> tuple:
    """Boundary trace of the half-disc ``m`` maps the repelling half-disc's complement into.

    Returns ``("in", lo, hi)`` for the interval ``(lo, hi)`` or ``("out", lo, hi)``
    for the complement of ``[lo, hi]`` (a half-disc containing infinity).
    For ``c != 0`` this is the isometric circle of ``m^-1``; for diagonal
    matrices the circles ``|z| = lambda^{+-1}`` play that role.
    """
    if m.c != 0.0:
        r = 1.0 / abs(m.c)
        return ("in", m.a / m.c - r, m.a / m.c + r)
    if m.b != 0.0:
        raise UsageError("ping-pong discs are only defined for diagonal or c != 0 matrices")
    lam = abs(m.a)
    if lam > 1.0:
        return ("out", -lam, lam)
    return ("in", -lam, lam)


def _discs_disjoint(p: tuple, q: tuple) -> bool:
    if p[0] == "out" and q[0] == "out":
        return False
    if p[0] == "out":
        p, q = q, p
    if q[0] == "in":
        return p[2] < q[1] or q[2] < p[1]
    return q[1] < p[1] and p[2] < q[2]


def ping_pong_check(generators: Mapping[int, Mobius], gens: fg.GeneratorSet) -> bool:
    """True when the attracting half-discs of all letters have disjoint closures.

    By the ping-pong lemma the matrices then generate a free, convex
    cocompact (Schottky) group with the letters as free basis.
    """
    discs = []
    for x in gens.letters:
        m = generators[x]
        if m.translation_length() <= 0.0:
            return False
        discs.append(attracting_disc(m))
    return all(_discs_disjoint(discs[i], discs[j]) for i in range(len(discs)) for j in range(i))
