"""Level-by-level enumeration of automaton paths with displacement pruning."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import group as fg
from ..errors import AuditError, BudgetError, UsageError
from ..system import GroupSystem

NODE_BUDGET = 5_000_000
AUDIT_TOL = 1e-9


@dataclass
class Enumeration:
    """Accepted paths extending ``prefix`` whose key is at most ``T_max``.

    ``key`` is ``"orbit"`` (displacement of the path's element) or
    ``"conj"`` (displacement of ``h^-1 g h`` for the path's element ``h``).
    Words are rebuilt from parent pointers on demand.
    """

    prefix: tuple
    keys: np.ndarray
    lengths: np.ndarray
    ids: np.ndarray
    parent: np.ndarray
    letter: np.ndarray
    visited: int
    envelope: tuple | None = None
    max_drop: float = 0.0

    def word(self, i: int) -> tuple:
        node = int(self.ids[i])
        out = []
        while self.parent[node] >= 0:
            out.append(int(self.letter[node]))
            node = int(self.parent[node])
        return self.prefix + tuple(reversed(out))

    def words(self) -> list:
        return [self.word(i) for i in range(len(self.ids))]

    def __len__(self):
        return len(self.ids)


def _disp(system: GroupSystem, m: np.ndarray) -> np.ndarray:
    return system.displacement_of_matrices(m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1])


def _conj_disp(system: GroupSystem, g_mat: np.ndarray, m: np.ndarray) -> np.ndarray:
    inv = np.empty_like(m)
    inv[:, 0, 0] = m[:, 1, 1]
    inv[:, 0, 1] = -m[:, 0, 1]
    inv[:, 1, 0] = -m[:, 1, 0]
    inv[:, 1, 1] = m[:, 0, 0]
    c = np.einsum("kij,jl,klm->kim", inv, g_mat, m)
    return _disp(system, c)


def _word_matrix(system: GroupSystem, word) -> np.ndarray:
    out = np.eye(2)
    for x in word:
        out = out @ system.letter_matrices()[x]
    return out


def enumerate_paths(
    auto,
    system: GroupSystem,
    T_max: float,
    prefix=(),
    key: str = "orbit",
    g=None,
    envelope: tuple | None = None,
    max_len: int | None = None,
    node_budget: int = NODE_BUDGET,
) -> Enumeration:
    """Breadth-first walk over the automaton from ``prefix``.

    A node of word length ``n`` is expanded unless no descendant can have key
    at most ``T_max``.  Without an ``envelope`` this uses monotonicity, which
    holds for orbit keys on trees.  With ``envelope = (s, c, K)`` two lower
    bounds are used: ``key >= s n - c`` and ``key >= peak - K``, where
    ``peak`` is the largest key met along the path so far.  A node is expanded
    only while both bounds allow a descendant below ``T_max``, and every
    visited node is audited against both; a violation raises
    :class:`AuditError`.
    """
    gens = system.gens
    prefix = tuple(prefix)
    v0 = auto.run(prefix)
    if v0 is None:
        raise UsageError(f"prefix {gens.format(prefix)!r} is not accepted")
    if key not in ("orbit", "conj"):
        raise UsageError(f"unknown key {key!r}")
    if key == "conj":
        g = fg.reduce_word(gens, g)
    if envelope is None and not (system.is_tree and key == "orbit") and max_len is None:
        raise UsageError("pruning without an envelope is only exact for tree orbit keys")
    tree = system.is_tree
    weights = np.asarray(system.space.weights) if tree else None
    wmin = float(weights.min()) if tree else 0.0
    g_mat = None if tree or key != "conj" else _word_matrix(system, g)
    letters = None if tree else system.letter_matrices()

    parent = [-1]
    letter = [-1]
    n = len(prefix)
    states = np.array([v0])
    ids = np.array([0])
    if tree:
        elems = [prefix]
        cum = np.array([system.space.word_length(prefix)])
    else:
        elems = _word_matrix(system, prefix)[None]
    rec_keys, rec_lens, rec_ids = [], [], []
    peak_parent = np.array([-np.inf])
    max_drop = 0.0

    while len(ids):
        if tree:
            if key == "orbit":
                keys = cum
            else:
                keys = np.array([system.space.word_length(fg.multiply(gens, fg.invert(gens, u), g, u)) for u in elems])
        else:
            keys = _disp(system, elems) if key == "orbit" else _conj_disp(system, g_mat, elems)
        drops = peak_parent - keys
        max_drop = max(max_drop, float(drops.max()))
        peak = np.maximum(peak_parent, keys)
        if envelope is not None:
            s, c, K = envelope
            bad = keys < s * n - c - AUDIT_TOL
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise AuditError(
                    f"pruning envelope violated at word length {n}: key {keys[i]:.6g} < {s * n - c:.6g}"
                )
            bad = drops > K + AUDIT_TOL
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise AuditError(f"key dropped by {drops[i]:.6g} along a path, more than the bound {K:.6g}")
        hit = keys <= T_max + 1e-9
        rec_keys.append(keys[hit])
        rec_lens.append(np.full(int(hit.sum()), n))
        rec_ids.append(ids[hit])

        if max_len is not None and n >= max_len:
            break
        if envelope is not None:
            s, c, K = envelope
            grow = (peak - K <= T_max + 1e-9) & (s * (n + 1) - c <= T_max + 1e-9)
        else:
            grow = keys + wmin <= T_max + 1e-9
        if max_len is not None and envelope is None and not (tree and key == "orbit"):
            grow = np.ones(len(ids), dtype=bool)
        idx_all = np.flatnonzero(grow)
        if not len(idx_all):
            break

        new_states, new_src, new_x = [], [], []
        for v in np.unique(states[idx_all]):
            idx = idx_all[states[idx_all] == v]
            for x, t in auto.out_edges(int(v)):
                new_src.append(idx)
                new_x.append(np.full(len(idx), x))
                new_states.append(np.full(len(idx), t))
        if not new_src:
            break
        src = np.concatenate(new_src)
        xs = np.concatenate(new_x)
        if len(parent) + len(src) > node_budget:
            raise BudgetError(f"enumeration exceeded {node_budget} nodes at word length {n + 1}")
        start = len(parent)
        parent.extend(ids[src].tolist())
        letter.extend(xs.tolist())
        ids = np.arange(start, start + len(src))
        states = np.concatenate(new_states)
        peak_parent = peak[src]
        if tree:
            elems = [elems[i] + (int(x),) for i, x in zip(src, xs)]
            cum = cum[src] + weights[xs]
        else:
            elems = np.einsum("kij,kjl->kil", elems[src], letters[xs])
        n += 1

    return Enumeration(
        prefix,
        np.concatenate(rec_keys),
        np.concatenate(rec_lens),
        np.concatenate(rec_ids),
        np.array(parent),
        np.array(letter),
        len(parent),
        envelope,
        max_drop,
    )


def _enumerate_branch(args):
    return enumerate_paths(*args[0], **args[1])


def enumerate_parallel(auto, system, T_max, prefix=(), jobs: int = 1, **kw) -> list:
    """Split the enumeration over first-letter branches and merge in letter order.

    Returns a list of :class:`Enumeration` parts; the first covers the
    prefix itself and the others one branch each.
    """
    if jobs <= 1:
        return [enumerate_paths(auto, system, T_max, prefix, **kw)]
    prefix = tuple(prefix)
    root = enumerate_paths(auto, system, T_max, prefix, **{**kw, "max_len": len(prefix)})
    v = auto.run(prefix)
    branches = [((auto, system, T_max, prefix + (x,)), kw) for x, _ in auto.out_edges(v)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_enumerate_branch, branches))
    return [root] + parts


def estimate_envelope(auto, system: GroupSystem, key: str = "orbit", g=None, max_len: int = 8,
                      margin: float = 0.5) -> tuple:
    """Pruning constants ``(s, c, K)`` fitted to all accepted words up to ``max_len``.

    ``s`` is 0.9 times the growth of the per-length minimum between
    ``max_len/2`` and ``max_len``; ``c`` makes ``key >= s n - c`` hold with
    ``margin``.  ``K`` is the largest drop of the key below an earlier
    value on the same path, plus ``margin``.
    """
    e = enumerate_paths(auto, system, np.inf, (), key, g, None, max_len)
    mins = {}
    for k, n in zip(e.keys, e.lengths):
        mins[int(n)] = min(mins.get(int(n), np.inf), float(k))
    top = max(mins)
    half = top // 2
    slope = (mins[top] - mins[half]) / (top - half) if top > half else mins[top]
    s = 0.9 * slope
    if s <= 0:
        raise AuditError("key does not grow with word length; no pruning envelope exists")
    c = max(s * n - m for n, m in mins.items()) + margin
    return float(s), float(c), float(max(e.max_drop, 0.0) + margin)
