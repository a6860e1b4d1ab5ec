"""Comparing conjugate displacements with twice the representative's displacement."""

from __future__ import annotations

import math

import numpy as np

from .. import group as fg
from ..geometry import gromov_product
from ..system import GroupSystem
from .enumerate import enumerate_paths, estimate_envelope
from .orbits import count_cylinder_restricted


def tau(system: GroupSystem, g, u) -> float:
    """Correction term ``d(g x0, x0) - 2 (u x0 | g u x0)_{g x0} - 2 (g x0 | u x0)_{x0}``."""
    space, x0 = system.space, system.basepoint
    gx = system.orbit_point(g)
    ux = system.orbit_point(u)
    gux = system.orbit_point(fg.multiply(system.gens, g, u))
    return space.distance(gx, x0) - 2 * gromov_product(space, gx, ux, gux) - 2 * gromov_product(space, x0, gx, ux)


def comparison_error(system: GroupSystem, g, u, x) -> float:
    """``|d(h^-1 g h x0, x0) - 2 d(h x0, x0) - tau(u)|`` for the extension ``h = x`` of ``u``."""
    conj = fg.conjugate(system.gens, x, g)
    return abs(system.displacement(conj) - 2 * system.displacement(x) - tau(system, g, u))


def length_comparison_audit(system: GroupSystem, g, auto, depths, extend: int = 4, sample_budget: int = 400_000,
                            seed: int = 0) -> list:
    """Largest comparison error over prefixes of each length ``l`` and their extensions.

    Extensions add up to ``extend`` letters.  When a depth would need more
    than ``sample_budget`` evaluations, a seeded random subset of prefixes
    is used.  Returns ``(l, max_error, pairs_checked)`` triples.
    """
    gens = system.gens
    g = fg.reduce_word(gens, g)
    rng = np.random.default_rng(seed)
    out = []
    for depth in depths:
        prefixes = [w for w in auto.language(depth) if len(w) == depth]
        per = _extension_count(auto, prefixes, extend)
        if per * len(prefixes) > sample_budget and prefixes:
            keep = max(1, sample_budget // max(per, 1))
            pick = rng.choice(len(prefixes), size=min(keep, len(prefixes)), replace=False)
            prefixes = [prefixes[i] for i in sorted(pick)]
        worst, pairs = 0.0, 0
        for u in prefixes:
            t = tau(system, g, u)
            e = enumerate_paths(auto, system, np.inf, u, "conj", g, None, depth + extend)
            if system.is_tree:
                hd = np.array([system.space.word_length(w) for w in e.words()])
            else:
                e_orbit = enumerate_paths(auto, system, np.inf, u, "orbit", None, None, depth + extend)
                hd = e_orbit.keys
            err = np.abs(e.keys - 2 * hd - t)
            worst = max(worst, float(err.max()))
            pairs += len(err)
        out.append((depth, worst, pairs))
    return out


def _extension_count(auto, prefixes, extend) -> int:
    if not prefixes:
        return 0
    v = auto.run(prefixes[0])
    total, level = 1, [v]
    for _ in range(extend):
        level = [t for s in level for _, t in auto.out_edges(s)]
        total += len(level)
    return total


def fit_ratio(audit) -> float:
    """Geometric ratio fitted to the positive audit errors (0 when all vanish)."""
    pts = [(l, e) for l, e, *_ in audit if e > 0]
    if len(pts) < 2:
        return 0.0
    l, e = np.array(pts).T
    return float(np.exp(np.polyfit(l, np.log(e), 1)[0]))


def estimate_C(system: GroupSystem, g, auto, l: int, T_ref: float, delta: float) -> dict:
    """``sum_u C_u exp(-delta tau(u) / 2)`` over representatives of length ``l``.

    ``C_u`` is read off as ``N^u(T_ref) exp(-delta T_ref)``; prefixes whose
    count at ``T_ref`` is below 50 are flagged as low confidence.
    """
    gens = system.gens
    g = fg.reduce_word(gens, g)
    terms = []
    low = []
    env = None if system.is_tree else estimate_envelope(auto, system, "orbit")
    for u in auto.language(l):
        if len(u) != l:
            continue
        s = count_cylinder_restricted(system, g, u, T_ref, grid=[T_ref], acceptor=auto, delta=delta,
                                      envelope=env)
        n = s.counts[-1]
        if n < 50:
            low.append(gens.format(u))
        terms.append(s.meta["C_hat"] * math.exp(-delta * tau(system, g, u) / 2))
    return {"C": math.fsum(terms), "l": l, "T_ref": T_ref, "prefixes": len(terms), "low_confidence": low}
