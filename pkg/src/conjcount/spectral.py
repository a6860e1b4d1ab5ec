"""Transfer matrices on cylinders, pressure and critical exponents."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq

from .coding import APERIODIC_EMPTY, Component, ComponentGraph, component_period
from .errors import BudgetError, ConvergenceError, UsageError
from .potential import component_paths

PERRON_TOL = 1e-12
ROOT_TOL = 1e-10
DERIV_STEP = 1e-5
MAXIMAL_TOL = 1e-8


class EmptySpectrum(UsageError):
    """The component has no cycle, so its transfer matrix is nilpotent."""

    code = "empty_spectrum"


@dataclass
class TransferMatrix:
    """Weighted adjacency of depth-``n`` cylinders inside one component.

    ``K[c, c']`` is ``exp(-t * r(c))`` when ``c'`` is the shift of ``c`` by one
    step.  The transposed weighting ``exp(-t * r(c'))`` on the predecessor
    relation has the same spectrum.
    """

    component: Component
    depth: int
    t: float
    paths: list
    roof: np.ndarray
    succ_rows: np.ndarray
    succ_cols: np.ndarray

    @classmethod
    def build(cls, component: Component, potential, depth: int, t: float = 0.0) -> "TransferMatrix":
        if not component.has_cycle:
            raise EmptySpectrum(f"component {component.index} has no cycle")
        paths = component_paths(component, depth)
        roof = np.array([potential.value(p) for p in paths])
        rows, cols = [], []
        by_head = {}
        for j, p in enumerate(paths):
            by_head.setdefault(p[:-1], []).append(j)
        for i, p in enumerate(paths):
            for j in by_head.get(p[1:], []):
                rows.append(i)
                cols.append(j)
        return cls(component, depth, float(t), paths, roof, np.array(rows), np.array(cols))

    def at(self, t: float) -> "TransferMatrix":
        return TransferMatrix(self.component, self.depth, float(t), self.paths, self.roof, self.succ_rows, self.succ_cols)

    def matrix(self) -> sp.csr_matrix:
        n = len(self.paths)
        data = np.exp(-self.t * self.roof[self.succ_rows])
        return sp.csr_matrix((data, (self.succ_rows, self.succ_cols)), shape=(n, n))


def perron_root(K: sp.spmatrix, period: int = 1, tol: float = PERRON_TOL, max_iter: int = 200_000) -> tuple:
    """Perron root and right eigenvector of an irreducible nonnegative matrix.

    Power iteration on ``K**period``; for a periodic matrix that power splits
    into primitive blocks sharing the root ``rho**period``.  The iteration
    stops once the Collatz-Wielandt bounds agree to relative ``tol``.
    """
    n = K.shape[0]
    x = np.ones(n)
    lo = hi = 0.0
    best, stale = np.inf, 0
    for _ in range(max_iter):
        y = x
        for _ in range(period):
            y = K @ y
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if hi <= 0:
            raise ConvergenceError("transfer matrix annihilates the positive cone")
        gap = (hi - lo) / hi
        if gap <= tol:
            break
        # rounding can stall the bracket just above tol on badly scaled matrices
        if gap < best * 0.999:
            best, stale = gap, 0
        else:
            stale += 1
            if stale > 100 and gap <= 1e3 * tol:
                break
        x = y / np.linalg.norm(y)
    else:
        raise ConvergenceError(f"power iteration did not converge (bounds {lo}, {hi})")
    rho = (0.5 * (lo + hi)) ** (1.0 / period)
    return rho, x / x.sum()


def pressure(component: Component, potential, t: float, depth: int) -> float:
    """log of the Perron root of the depth-``depth`` transfer matrix at ``t``."""
    return _pressure_of(TransferMatrix.build(component, potential, depth, t), component_period(component))


def _pressure_of(tm: TransferMatrix, period: int) -> float:
    if period == APERIODIC_EMPTY:
        raise EmptySpectrum(f"component {tm.component.index} has no cycle")
    rho, _ = perron_root(tm.matrix(), period)
    return math.log(rho)


@dataclass
class PressureCurve:
    component: int
    samples: list = field(default_factory=list)
    root: float = float("nan")
    derivative_at_root: float = float("nan")

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "P", "dP_dt"])
        for t, p, dp in self.samples:
            w.writerow([f"{t:.17g}", f"{p:.17g}", f"{dp:.17g}"])


class _PressureFunction:
    def __init__(self, component, potential, depth):
        self.tm = TransferMatrix.build(component, potential, depth)
        self.period = component_period(component)
        self.cache = {}

    def __call__(self, t):
        t = float(t)
        if t not in self.cache:
            self.cache[t] = _pressure_of(self.tm.at(t), self.period)
        return self.cache[t]

    def derivative(self, t, h=DERIV_STEP):
        return (self(t + h) - self(t - h)) / (2 * h)


def critical_exponent(component: Component, potential, depth: int, t_hi: float = 10.0) -> float:
    """Zero of ``t -> P(-t r)`` on one component."""
    return _critical(_PressureFunction(component, potential, depth), t_hi)


def _critical(P: _PressureFunction, t_hi: float = 10.0) -> float:
    p0 = P(0.0)
    if p0 == 0.0:
        return 0.0
    if p0 > 0:
        lo, hi = 0.0, t_hi
        for _ in range(60):
            if P(hi) < 0:
                break
            lo, hi = hi, 2 * hi
        else:
            raise ConvergenceError("pressure stays positive; no critical exponent found")
    else:
        lo, hi = -t_hi, 0.0
        for _ in range(60):
            if P(lo) > 0:
                break
            lo, hi = 2 * lo, lo
        else:
            raise ConvergenceError("pressure stays negative; no critical exponent found")
    root = brentq(P, lo, hi, xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps)
    if not P.derivative(root) < 0:
        raise ConvergenceError(f"pressure is not decreasing at its zero {root}")
    return root


def pressure_curve(component: Component, potential, depth: int, ts) -> PressureCurve:
    P = _PressureFunction(component, potential, depth)
    curve = PressureCurve(component.index)
    curve.samples = [(float(t), P(t), P.derivative(t)) for t in ts]
    curve.root = _critical(P)
    curve.derivative_at_root = P.derivative(curve.root)
    return curve


def system_delta(graph: ComponentGraph, potential, depth: int) -> tuple:
    """Largest critical exponent over the recurrent components and the set attaining it."""
    comps = graph.recurrent
    if not comps:
        raise EmptySpectrum("the shift has no recurrent component")
    funcs = {c.index: _PressureFunction(c, potential, depth) for c in comps}
    roots = {i: _critical(P) for i, P in funcs.items()}
    a = max(roots.values())
    maximal = {i for i, P in funcs.items() if abs(P(a)) <= MAXIMAL_TOL}
    graph.maximal_flags = [c.index in maximal for c in graph.components]
    return a, maximal


def maximal_path_multiplicity(graph: ComponentGraph | nx.DiGraph, maximal) -> int:
    """Most maximal components met by one path through the condensation."""
    dag = graph.dag() if isinstance(graph, ComponentGraph) else graph
    best = {}
    for v in reversed(list(nx.topological_sort(dag))):
        here = 1 if v in maximal else 0
        best[v] = here + max((best[w] for w in dag.successors(v)), default=0)
    return max(best.values(), default=0)


# -- periodic orbits -------------------------------------------------------


def necklaces(component: Component, max_len: int, limit: int = 10**7):
    """Closed walks of length ``1..max_len`` in the component, one per rotation class.

    Walks are written with local indices and each class is reported by its
    least rotation; powers of shorter walks are included.  This is the
    Fredricksen-Kessler-Maiorana scheme restricted to admissible letters.
    """
    adj = component.adjacency
    k = adj.shape[0]
    succ = [set(np.flatnonzero(adj[i]).tolist()) for i in range(k)]
    a = [0] * (max_len + 1)
    count = 0

    def rec(t, p):
        # a[1:t] is a prenecklace with period p
        nonlocal count
        n = t - 1
        if n >= 1 and n % p == 0 and a[1] in succ[a[n]]:
            count += 1
            if count > limit:
                raise BudgetError(f"more than {limit} periodic orbits")
            yield tuple(a[1:t])
        if t > max_len:
            return
        for j in range(a[t - p], k):
            if t > 1 and j not in succ[a[t - 1]]:
                continue
            a[t] = j
            yield from rec(t + 1, p if j == a[t - p] else t)

    yield from rec(1, 1)


def periodic_sums(component: Component, potential, max_len: int, limit: int = 10**7) -> list:
    states = component.states
    return [
        (len(c), potential.periodic_sum(tuple(states[i] for i in c)))
        for c in necklaces(component, max_len, limit)
    ]


def periodic_orbit_count(component: Component, potential, T: float, limit: int = 10**7) -> int:
    """Periodic orbits whose Birkhoff sum over one period is at most ``T``."""
    step = potential.min_step()
    if step <= 0:
        raise UsageError("the potential needs a positive lower bound per step")
    max_len = int(math.floor(T / step + 1e-9))
    if max_len < 1:
        return 0
    return sum(1 for _, s in periodic_sums(component, potential, max_len, limit) if s <= T + 1e-9)


@dataclass
class LatticeResult:
    arithmetic: bool | None
    span: float | None
    lengths: list

    @property
    def verdict(self) -> str:
        if self.arithmetic is None:
            return "inconclusive"
        return "arithmetic" if self.arithmetic else "non-arithmetic"


def common_span(values, tol: float = 1e-9, max_den: int = 1000):
    """Largest ``b`` with every value in ``b*Z``, or ``None`` when some ratio is irrational."""
    vals = sorted(v for v in values if v > tol)
    if not vals:
        return None
    base = vals[0]
    fracs = []
    for v in vals:
        r = v / base
        f = Fraction(r).limit_denominator(max_den)
        if abs(r - float(f)) > tol * max(1.0, r):
            return None
        fracs.append(f)
    den = reduce(math.lcm, (f.denominator for f in fracs))
    num = reduce(math.gcd, (f.numerator * (den // f.denominator) for f in fracs))
    return base * num / den


def lattice_test(component: Component, potential, orbit_length_budget: int, tol: float = 1e-9) -> LatticeResult:
    """Decide whether the periodic Birkhoff sums lie in a common lattice ``bZ``."""
    sums = sorted({round(s, 12) for _, s in periodic_sums(component, potential, orbit_length_budget)})
    if len(sums) < 3:
        return LatticeResult(None, None, sums)
    b = common_span(sums, tol)
    return LatticeResult(b is not None, b, sums)
