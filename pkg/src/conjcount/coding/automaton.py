"""Labelled automata whose paths from the start vertex spell words."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .. import group as fg
from ..errors import UsageError


@dataclass
class LabeledAutomaton:
    """Directed graph with start vertex ``start`` and letter-labelled edges.

    Every vertex accepts, so the language is prefix closed.  ``edges`` is a
    sorted list of ``(src, dst, label)`` triples.
    """

    gens: fg.GeneratorSet
    n_states: int
    edges: list
    start: int = 0
    subgroup_tag: str = "{e}"
    deterministic: bool = True
    state_info: list = field(default=None, repr=False)
    verified_len: int | None = None
    signature_radius: int | None = None

    def __post_init__(self):
        self.edges = sorted({(int(s), int(t), int(x)) for s, t, x in self.edges})
        self._out = [[] for _ in range(self.n_states)]
        self._delta = {}
        for s, t, x in self.edges:
            if not (0 <= s < self.n_states and 0 <= t < self.n_states):
                raise UsageError(f"edge {(s, t, x)} leaves the vertex set")
            self.gens.check([x])
            if t == self.start:
                raise UsageError("no edge may end at the start vertex")
            if (s, x) in self._delta:
                if self.deterministic:
                    raise UsageError(f"two edges labelled {x} leave vertex {s}")
            else:
                self._delta[(s, x)] = t
            self._out[s].append((x, t))
        for lst in self._out:
            lst.sort(key=lambda e: (self.gens.key(e[0]), e[1]))
        unreachable = set(range(self.n_states)) - self.reachable()
        if unreachable:
            raise UsageError(f"vertices {sorted(unreachable)} are unreachable from the start")

    # -- structure -------------------------------------------------------------

    def out_edges(self, v: int) -> list:
        """Outgoing ``(label, target)`` pairs in generator order."""
        return self._out[v]

    def step(self, v: int, x: int):
        return self._delta.get((v, x))

    def reachable(self) -> set:
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            v = queue.popleft()
            for _, t in self._out[v]:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return seen

    def adjacency(self) -> np.ndarray:
        """Integer matrix counting edges between vertices."""
        a = np.zeros((self.n_states, self.n_states), dtype=np.int64)
        for s, t, _ in self.edges:
            a[s, t] += 1
        return a

    # -- language ------------------------------------------------------------

    def run(self, word: Sequence[int]):
        """Final vertex after reading ``word`` from the start, or ``None``."""
        v = self.start
        for x in word:
            v = self._delta.get((v, x))
            if v is None:
                return None
        return v

    def accepts(self, word: Sequence[int]) -> bool:
        return self.run(word) is not None

    def path(self, word: Sequence[int]) -> tuple:
        """Vertex sequence ``(start, v1, ..., vl)`` spelled by ``word``."""
        v = self.start
        out = [v]
        for x in word:
            v = self._delta.get((v, x))
            if v is None:
                raise UsageError(f"word {self.gens.format(word)!r} is not accepted")
            out.append(v)
        return tuple(out)

    def label(self, path: Sequence[int]) -> tuple:
        """Letters along a vertex path; each consecutive pair must be an edge."""
        labels = []
        for s, t in zip(path, path[1:]):
            found = [x for x, tt in self._out[s] if tt == t]
            if not found:
                raise UsageError(f"({s}, {t}) is not an edge")
            labels.append(found[0])
        return tuple(labels)

    def language(self, max_len: int) -> Iterator[tuple]:
        """Accepted words of length at most ``max_len`` in shortlex order."""
        level = [((), self.start)]
        for n in range(max_len + 1):
            for w, _ in level:
                yield w
            if n == max_len:
                break
            level = [(w + (x,), t) for w, v in level for x, t in self._out[v]]

    def counts_by_length(self, max_len: int) -> list:
        """Number of accepted words of each length, by powers of the adjacency matrix."""
        a = self.adjacency().astype(object)
        vec = np.zeros(self.n_states, dtype=object)
        vec[self.start] = 1
        out = []
        for _ in range(max_len + 1):
            out.append(int(vec.sum()))
            vec = vec.dot(a)
        return out

    # -- serialisation ---------------------------------------------------------

    def to_text(self) -> str:
        names = self.gens.names
        lines = [f"vertices {self.n_states} start {self.start}"]
        lines += [f"{s} {t} {names[x]}" for s, t, x in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, gens: fg.GeneratorSet, text: str, **kwargs) -> "LabeledAutomaton":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        head = rows[0]
        if len(head) != 4 or head[0] != "vertices" or head[2] != "start":
            raise UsageError("automaton header must read 'vertices N start S'")
        lookup = {c: i for i, c in enumerate(gens.names)}
        edges = [(int(s), int(t), lookup[x]) for s, t, x in rows[1:]]
        return cls(gens, int(head[1]), edges, start=int(head[3]), **kwargs)


def build_geodesic_acceptor(gens: fg.GeneratorSet) -> LabeledAutomaton:
    """Geodesic acceptor of a free group: vertex ``1+x`` remembers the last letter ``x``."""
    edges = [(0, 1 + x, x) for x in gens.letters]
    edges += [(1 + x, 1 + y, y) for x in gens.letters for y in gens.letters if y != gens.inv(x)]
    info = ["*"] + [gens.names[x] for x in gens.letters]
    return LabeledAutomaton(gens, 1 + gens.size, edges, subgroup_tag="{e}", state_info=info)
