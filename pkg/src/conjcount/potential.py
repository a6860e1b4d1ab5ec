"""Roof functions on the augmented shift.

The roof of a terminating sequence ``(v0, ..., vl, 0, 0, ...)`` with label
word ``w`` is ``d(w x0, x0) - d(w[1:] x0, x0)``, so Birkhoff sums along a
path from the start vertex telescope to the displacement of its label word.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coding import AugmentedShift, Component
from .errors import UsageError
from .system import GroupSystem


def _path_letters(shift: AugmentedShift, path) -> list:
    if not shift.is_admissible(path):
        raise UsageError(f"path {tuple(path)} is not admissible")
    out = []
    for s, t in zip(path, path[1:]):
        out.append(None if t == shift.zero else shift.labels[(s, t)])
    return out


class RoofPotential:
    """Roof function built from a group system acting on its model space."""

    def __init__(self, shift: AugmentedShift, system: GroupSystem):
        if shift.automaton is None:
            raise UsageError("a roof potential needs a shift built from an automaton")
        self.shift = shift
        self.system = system
        self._disp = {(): 0.0}

    def displacement(self, word) -> float:
        word = tuple(word)
        d = self._disp.get(word)
        if d is None:
            d = self._disp[word] = self.system.displacement(word)
        return d

    def roof(self, path) -> float:
        letters = _path_letters(self.shift, path)
        if not letters or letters[0] is None:
            return 0.0
        w = tuple(x for x in letters if x is not None)
        return self.displacement(w) - self.displacement(w[1:])

    value = roof

    def periodic_sum(self, cycle) -> float:
        """Birkhoff sum over one period of the periodic point ``cycle`` repeated forever."""
        closed = tuple(cycle) + (cycle[0],)
        return self.system.periodic_length(self.shift.label_word(closed))

    def min_step(self) -> float:
        """Lower bound on the periodic sum per shift step."""
        return self.system.length_envelope()[0]


@dataclass
class ConstantPotential:
    """``r = c`` away from the zero state; used for toy shifts."""

    shift: AugmentedShift
    c: float = 1.0

    def roof(self, path) -> float:
        if not self.shift.is_admissible(path):
            raise UsageError(f"path {tuple(path)} is not admissible")
        if len(path) < 2 or path[1] == self.shift.zero:
            return 0.0
        return float(self.c)

    value = roof

    def periodic_sum(self, cycle) -> float:
        return self.c * len(cycle)

    def min_step(self) -> float:
        return float(self.c)


@dataclass
class CylinderPotential:
    """Roof values on depth-``n`` cylinders, each taken at its terminating extension."""

    depth: int
    values: dict = field(default_factory=dict)
    space: object = None

    @classmethod
    def build(cls, potential, component: Component, depth: int) -> "CylinderPotential":
        if depth < 1:
            raise UsageError("cylinder depth must be at least 1")
        paths = component_paths(component, depth)
        values = {p: potential.value(p) for p in paths}
        space = getattr(potential, "system", None)
        return cls(depth, values, space)

    def value(self, path) -> float:
        return self.values[tuple(path)]

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["path", "value"])
        for p in sorted(self.values):
            w.writerow(["-".join(str(v) for v in p), f"{self.values[p]:.17g}"])


def component_paths(component: Component, depth: int) -> list:
    """All paths ``(v0, ..., v_depth)`` with every vertex in ``component``, sorted."""
    adj = component.adjacency
    states = component.states
    succ = [np.flatnonzero(adj[i]).tolist() for i in range(len(states))]
    level = [(i,) for i in range(len(states))]
    for _ in range(depth):
        level = [p + (j,) for p in level for j in succ[p[-1]]]
    return sorted(tuple(states[i] for i in p) for p in level)


def roof_on_terminating(shift: AugmentedShift, system: GroupSystem, path) -> float:
    return RoofPotential(shift, system).roof(path)


def birkhoff_displacement_check(shift: AugmentedShift, system: GroupSystem, path) -> tuple:
    """Birkhoff sum of the roof along ``path`` against the displacement of its label word."""
    path = tuple(path)
    if not path:
        return 0.0, 0.0
    if path[0] != shift.start:
        raise UsageError("Birkhoff check paths start at the start vertex")
    pot = RoofPotential(shift, system)
    lhs = math.fsum(pot.roof(path[k:]) for k in range(len(path) - 1))
    rhs = pot.displacement(shift.label_word(path))
    return lhs, rhs


def _extension_words(auto, v: int, extend: int) -> list:
    out = [()]
    level = [((), v)]
    for _ in range(extend):
        level = [(w + (x,), t) for w, s in level for x, t in auto.out_edges(s)]
        out += [w for w, _ in level]
    return out


def _word_arrays(system: GroupSystem, words: Sequence[tuple]) -> np.ndarray:
    mats = system.letter_matrices()
    out = np.broadcast_to(np.eye(2), (len(words), 2, 2)).copy()
    for i, w in enumerate(words):
        for x in w:
            out[i] = out[i] @ mats[x]
    return out


def hoelder_audit(
    shift: AugmentedShift,
    system: GroupSystem,
    depths: Sequence[int],
    extend: int = 4,
    prefix_budget: int = 4000,
    seed: int = 0,
) -> list:
    """Largest oscillation of the roof over terminating extensions of each depth-``n`` cylinder.

    Extensions add up to ``extend`` letters.  When a depth has more than
    ``prefix_budget`` cylinders a seeded random subset is examined.
    """
    auto = shift.automaton
    rng = np.random.default_rng(seed)
    nonzero = [v for v in range(shift.n_states) if v != shift.zero]
    ext_cache = {}
    out = []
    for n in depths:
        if n < 2:
            raise UsageError("audit depths start at 2")
        level = [((v,), ()) for v in nonzero]
        for _ in range(n):
            level = [(p + (t,), w + (x,)) for p, w in level for x, t in auto.out_edges(p[-1])]
        if len(level) > prefix_budget:
            pick = rng.choice(len(level), size=prefix_budget, replace=False)
            level = [level[i] for i in sorted(pick)]
        worst = 0.0
        for p, w in level:
            end = p[-1]
            if end not in ext_cache:
                words = _extension_words(auto, end, extend)
                if system.is_tree:
                    ext_cache[end] = np.array([system.space.word_length(e) for e in words])
                else:
                    ext_cache[end] = _word_arrays(system, words)
            ext = ext_cache[end]
            if system.is_tree:
                # acceptor labels are reduced words, so the extension adds the same length to both terms
                r = np.full(len(ext), system.space.word_length(w) - system.space.word_length(w[1:]))
            else:
                head = _word_arrays(system, [w, w[1:]])
                full = np.einsum("ij,kjl->kil", head[0], ext)
                tail = np.einsum("ij,kjl->kil", head[1], ext)
                r = _disp(system, full) - _disp(system, tail)
            worst = max(worst, float(r.max() - r.min()))
        out.append((n, worst))
    return out


def _disp(system: GroupSystem, m: np.ndarray) -> np.ndarray:
    return system.displacement_of_matrices(m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1])


def fit_contraction(audit: Sequence[tuple]) -> float:
    """Geometric decay ratio fitted to the nonzero oscillations of an audit."""
    pts = [(n, osc) for n, osc in audit if osc > 0]
    if len(pts) < 2:
        return 0.0
    n, osc = np.array(pts).T
    slope = np.polyfit(n, np.log(osc), 1)[0]
    return float(np.exp(slope))
