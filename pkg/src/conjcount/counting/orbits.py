"""Orbit, coset, cylinder and conjugacy-class counts."""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from .. import group as fg
from ..coding import LabeledAutomaton, build_coset_acceptor, build_geodesic_acceptor
from ..errors import CodingError, UsageError
from ..system import GroupSystem
from .enumerate import enumerate_parallel, estimate_envelope
from .series import CountSeries

MIN_VERIFIED = 8


def _check_verified(auto: LabeledAutomaton, min_verified: int) -> None:
    if auto.subgroup_tag == "{e}":
        return
    if auto.verified_len is None or auto.verified_len < min_verified:
        raise CodingError(
            f"coset acceptor verified to length {auto.verified_len}, {min_verified} required"
        )


def tree_spectrum(auto: LabeledAutomaton, system: GroupSystem, T_max: float, prefix=()) -> tuple:
    """Exact displacement distribution of accepted paths extending ``prefix``.

    Lengths add along reduced words, so a path is summarised by how many
    letters of each distinct weight it uses; counting paths per
    (state, usage) by dynamic programming gives exact integer multiplicities.
    """
    if not system.is_tree:
        raise UsageError("exact spectra need a tree")
    prefix = tuple(prefix)
    v0 = auto.run(prefix)
    if v0 is None:
        raise UsageError(f"prefix {system.gens.format(prefix)!r} is not accepted")
    weights = system.space.weights
    classes = sorted(set(weights))
    cls_of = [classes.index(w) for w in weights]
    base = [0] * len(classes)
    for x in prefix:
        base[cls_of[x]] += 1

    def value(usage):
        return math.fsum(k * w for k, w in zip(usage, classes))

    totals = defaultdict(int)
    level = {(v0, tuple(base)): 1}
    while level:
        nxt = defaultdict(int)
        for (v, usage), count in level.items():
            totals[usage] += count
            for x, t in auto.out_edges(v):
                u2 = list(usage)
                u2[cls_of[x]] += 1
                u2 = tuple(u2)
                if value(u2) <= T_max + 1e-9:
                    nxt[(t, u2)] += count
        level = nxt
    merged = defaultdict(int)
    for usage, count in totals.items():
        v = value(usage)
        if v <= T_max + 1e-9:
            merged[round(v, 12)] += count
    keys = sorted(merged)
    return np.array(keys, dtype=float), [merged[k] for k in keys]


def _spectrum_from_parts(parts) -> tuple:
    keys = np.concatenate([p.keys for p in parts])
    return keys, [1] * len(keys)


def _orbit_series(auto, system, T_max, grid, kind, prefix=(), jobs=1, provenance="", meta=None, envelope=None):
    meta = dict(meta or {})
    if system.is_tree:
        lengths, mult = tree_spectrum(auto, system, T_max, prefix)
        meta["method"] = "exact path-count recursion"
    else:
        env = envelope or estimate_envelope(auto, system, "orbit")
        parts = enumerate_parallel(auto, system, T_max, prefix, jobs, key="orbit", envelope=env)
        lengths, mult = _spectrum_from_parts(parts)
        meta["method"] = "pruned enumeration"
        meta["envelope"] = list(env)
        meta["visited"] = int(sum(p.visited for p in parts))
    return CountSeries.from_lengths(lengths, mult, kind, grid, T_max, provenance, meta)


def count_full_orbit(system: GroupSystem, T_max: float, grid=None, acceptor=None, jobs: int = 1,
                     provenance: str = "") -> CountSeries:
    """``N(T) = #{h : d(h x0, x0) <= T}`` over the geodesic acceptor."""
    auto = acceptor or build_geodesic_acceptor(system.gens)
    return _orbit_series(auto, system, T_max, grid, "full-orbit", jobs=jobs, provenance=provenance)


def _coset_acceptor(system, g, acceptor, min_verified):
    auto = acceptor or build_coset_acceptor(system.gens, g, verify_len=max(min_verified, 1))
    _check_verified(auto, min_verified)
    return auto


def count_coset_orbit(system: GroupSystem, g, T_max: float, grid=None, acceptor=None, jobs: int = 1,
                      min_verified: int = MIN_VERIFIED, provenance: str = "") -> CountSeries:
    """Minimal coset representatives ``u`` of ``Z(g)`` with ``d(u x0, x0) <= T``."""
    auto = _coset_acceptor(system, g, acceptor, min_verified)
    return _orbit_series(auto, system, T_max, grid, "coset", jobs=jobs, provenance=provenance)


def count_cylinder_restricted(system: GroupSystem, g, u, T_max: float, grid=None, acceptor=None,
                              delta: float | None = None, jobs: int = 1, min_verified: int = MIN_VERIFIED,
                              provenance: str = "", envelope=None) -> CountSeries:
    """Representatives extending the accepted prefix ``u``.

    With ``delta`` given, ``meta["C_hat"]`` holds ``N(T_max) exp(-delta T_max)``.
    ``envelope`` reuses pruning constants already estimated for ``auto``.
    """
    auto = _coset_acceptor(system, g, acceptor, min_verified)
    u = tuple(u)
    if not auto.accepts(u):
        raise UsageError(f"prefix {system.gens.format(u)!r} is not a coset representative")
    series = _orbit_series(auto, system, T_max, grid, "cylinder-restricted", u, jobs, provenance,
                           {"prefix": system.gens.format(u)}, envelope)
    if delta is not None:
        series.meta["C_hat"] = series.count_at(T_max) * math.exp(-delta * T_max)
    return series


def conjugate_word(gens, g, h) -> tuple:
    return fg.conjugate(gens, h, g)


def count_conjugacy_class(system: GroupSystem, g, T_max: float, grid=None, acceptor=None, jobs: int = 1,
                          min_verified: int = MIN_VERIFIED, provenance: str = "") -> CountSeries:
    """``#{h^-1 g h : d(h^-1 g h x0, x0) <= T}`` with ``h`` ranging over coset representatives.

    Distinct accepted paths must give distinct conjugates; a collision means
    the coding is wrong and raises :class:`CodingError`.
    """
    gens = system.gens
    g = fg.reduce_word(gens, g)
    if not g:
        raise UsageError("g must be a nontrivial element")
    auto = _coset_acceptor(system, g, acceptor, min_verified)
    env = estimate_envelope(auto, system, "conj", g)
    parts = enumerate_parallel(auto, system, T_max, (), jobs, key="conj", g=g, envelope=env)
    keys = np.concatenate([p.keys for p in parts])
    words = [w for p in parts for w in p.words()]
    conj = {conjugate_word(gens, g, h) for h in words}
    if len(conj) != len(words):
        raise CodingError(f"{len(words) - len(conj)} conjugates repeated among coset representatives")
    if not system.is_tree:
        mats = np.array([system.element(c).to_array().ravel() for c in conj])
        if len(mats):
            keyset = {tuple(np.round(m / 1e-9).astype(np.int64)) for m in mats}
            if len(keyset) != len(mats):
                raise CodingError("two conjugates coincide as isometries")
    meta = {"envelope": list(env), "visited": int(sum(p.visited for p in parts)), "g": gens.format(g)}
    return CountSeries.from_lengths(keys, [1] * len(keys), "conjugacy", grid, T_max, provenance, meta)


def conjugacy_oracle_counts(system: GroupSystem, g, thresholds, max_h_len: int) -> list:
    """Raw oracle: conjugates ``h^-1 g h`` over every reduced ``h`` with ``|h| <= max_h_len``, deduplicated."""
    gens = system.gens
    g = fg.reduce_word(gens, g)
    seen = {}
    for h in fg.reduced_words_upto(gens, max_h_len):
        c = fg.conjugate(gens, h, g)
        if c not in seen:
            seen[c] = system.displacement(c)
    vals = np.array(sorted(seen.values()))
    return [int(np.searchsorted(vals, t + 1e-9, side="right")) for t in thresholds]
