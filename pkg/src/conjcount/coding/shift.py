"""The augmented subshift and its strongly connected block structure."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from ..errors import CodingError, UsageError
from .automaton import LabeledAutomaton

#: period reported for a component without any cycle
APERIODIC_EMPTY = 0


@dataclass
class AugmentedShift:
    """Transition graph of an automaton plus an absorbing zero state.

    States ``0 .. n-1`` are the automaton vertices; ``zero = n`` is the added
    state.  Every state has an edge to ``zero`` and ``zero`` loops to itself.
    ``labels[(s, t)]`` is the letter on the automaton edge ``s -> t``; edges
    into ``zero`` carry no letter.
    """

    A: np.ndarray
    labels: dict = field(default_factory=dict)
    automaton: LabeledAutomaton | None = None
    start: int | None = 0

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=bool)
        n = self.A.shape[0]
        if self.A.shape != (n, n) or n == 0:
            raise UsageError("transition matrix must be square and nonempty")
        self.zero = n - 1
        if not self.A[:, self.zero].all():
            raise UsageError("every state needs an edge to the zero state")
        if self.A[self.zero, : self.zero].any():
            raise UsageError("the zero state may only loop to itself")
        self._succ = [np.flatnonzero(self.A[v]).tolist() for v in range(n)]

    @classmethod
    def from_automaton(cls, auto: LabeledAutomaton) -> "AugmentedShift":
        n = auto.n_states
        A = np.zeros((n + 1, n + 1), dtype=bool)
        labels = {}
        for s, t, x in auto.edges:
            if (s, t) in labels:
                raise CodingError(f"two letters label the transition {s} -> {t}")
            A[s, t] = True
            labels[(s, t)] = x
        A[:, n] = True
        return cls(A, labels, auto, auto.start)

    @classmethod
    def from_adjacency(cls, adjacency, labels=None) -> "AugmentedShift":
        """Toy shift from a square 0/1 matrix; the zero state is appended."""
        adj = np.asarray(adjacency, dtype=bool)
        n = adj.shape[0]
        A = np.zeros((n + 1, n + 1), dtype=bool)
        A[:n, :n] = adj
        A[:, n] = True
        return cls(A, dict(labels or {}), None, None)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    def successors(self, v: int) -> list:
        return self._succ[v]

    def is_admissible(self, path) -> bool:
        return all(0 <= v < self.n_states for v in path) and all(
            self.A[s, t] for s, t in zip(path, path[1:])
        )

    def label_word(self, path) -> tuple:
        """Letters along ``path``; edges into the zero state contribute nothing."""
        out = []
        for s, t in zip(path, path[1:]):
            if t == self.zero:
                continue
            out.append(self.labels[(s, t)])
        return tuple(out)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n_states))
        g.add_edges_from((int(s), int(t)) for s, t in zip(*np.nonzero(self.A)))
        return g


@dataclass
class Component:
    """One strongly connected block of the shift."""

    index: int
    states: tuple
    adjacency: np.ndarray
    is_zero: bool = False

    @property
    def has_cycle(self) -> bool:
        return bool(self.adjacency.any())

    def contains(self, v) -> bool:
        return v in self._set

    def __post_init__(self):
        self._set = frozenset(self.states)


@dataclass
class ComponentGraph:
    """Condensation of the shift.

    ``components`` are listed sinks first, so ordering the states block by
    block (``block_order``) makes the transition matrix lower block-triangular.
    ``edges`` holds index pairs ``(i, j)`` when some transition goes from
    component ``i`` to component ``j``.
    """

    shift: AugmentedShift
    components: list
    edges: set
    block_order: list
    maximal_flags: list = None

    def component_of(self, v: int) -> Component:
        return self.components[self._where[v]]

    def __post_init__(self):
        self._where = {v: c.index for c in self.components for v in c.states}

    @property
    def recurrent(self) -> list:
        """Components carrying at least one cycle, excluding the zero state."""
        return [c for c in self.components if c.has_cycle and not c.is_zero]

    @property
    def wandering(self) -> list:
        return [c for c in self.components if not c.has_cycle]

    def permuted_matrix(self) -> np.ndarray:
        p = self.block_order
        return self.shift.A[np.ix_(p, p)]

    def is_block_lower_triangular(self) -> bool:
        """Check the permuted matrix has no entry above the diagonal blocks."""
        pm = self.permuted_matrix()
        bounds = np.cumsum([0] + [len(c.states) for c in self.components])
        for i in range(len(self.components)):
            if pm[bounds[i] : bounds[i + 1], bounds[i + 1] :].any():
                return False
        for c in self.components:
            if c.has_cycle and not _irreducible(c.adjacency):
                return False
        return True

    def dag(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.components)))
        g.add_edges_from(self.edges)
        return g


def _irreducible(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(zip(*np.nonzero(adj)))
    return nx.is_strongly_connected(g) and adj.any()


def scc_decompose(shift: AugmentedShift) -> ComponentGraph:
    g = shift.graph()
    cond = nx.condensation(g)
    members = cond.nodes(data="members")
    topo = list(nx.lexicographical_topological_sort(cond, key=lambda c: -min(members[c])))
    order = list(reversed(topo))
    relabel = {old: new for new, old in enumerate(order)}
    comps = []
    for new, old in enumerate(order):
        states = tuple(sorted(int(v) for v in cond.nodes[old]["members"]))
        sub = shift.A[np.ix_(states, states)]
        comps.append(Component(new, states, sub, is_zero=(states == (shift.zero,))))
    edges = {(relabel[a], relabel[b]) for a, b in cond.edges}
    block_order = [v for c in comps for v in c.states]
    return ComponentGraph(shift, comps, edges, block_order)


def component_period(component: Component) -> int:
    """gcd of the cycle lengths inside the component, or ``APERIODIC_EMPTY``."""
    adj = component.adjacency
    n = adj.shape[0]
    if not adj.any():
        return APERIODIC_EMPTY
    level = [-1] * n
    level[0] = 0
    queue = deque([0])
    period = 0
    while queue:
        v = queue.popleft()
        for w in np.flatnonzero(adj[v]):
            if level[w] < 0:
                level[w] = level[v] + 1
                queue.append(w)
            else:
                period = math.gcd(period, level[v] + 1 - level[w])
    return abs(period)
