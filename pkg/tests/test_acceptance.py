"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conjcount import group as fg
from conjcount.coding import (
    AugmentedShift,
    build_coset_acceptor,
    build_geodesic_acceptor,
    minimal_coset_representatives,
    scc_decompose,
)
from conjcount.config import load_config, shipped_configs
from conjcount.counting import conjugacy_oracle_counts, estimate_C, fit_ratio
from conjcount.geometry import HalfPlane, Mobius, WeightedTree, gromov_product
from conjcount.pipeline import ArtifactDir, Experiment
from conjcount.potential import RoofPotential, birkhoff_displacement_check
from conjcount.spectral import critical_exponent, lattice_test, maximal_path_multiplicity, system_delta

F2 = fg.GeneratorSet(2)
LOG3 = math.log(3.0)
SEED = 20240611
CASES = 10_000


@contextmanager
def criterion(capsys, label, limit=None):
    """Time the block and print one PASS/FAIL line for it."""
    t0 = time.perf_counter()
    detail = {}
    ok = False
    try:
        yield detail
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        if ok and limit is not None and elapsed >= limit:
            ok = False
            detail["runtime"] = f"{elapsed:.1f}s over the {limit}s limit"
        info = ", ".join(f"{k}={v}" for k, v in detail.items())
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label} ({elapsed:.1f}s) {info}")
    if limit is not None:
        assert elapsed < limit, detail.get("runtime")


def test_criterion_1_tree_conjugacy_growth(capsys):
    with criterion(capsys, "1 conjugacy growth on the unit tree", limit=10) as d:
        exp = Experiment(load_config("f2_unit_tree_g_a"))
        conj = exp.count("conjugacy")
        counts = [conj.count_at(t) for t in (1, 3, 5, 7, 9)]
        d["counts"] = counts
        assert counts == [1, 3, 9, 27, 81]
        ts = np.arange(1.0, 14.0)
        assert [conj.count_at(t) for t in ts] == conjugacy_oracle_counts(exp.system, exp.g, ts, 6)
        assert all(conj.count_at(2 * n + 1) == 3 ** n for n in range(11))
        fit_conj = exp.fit(conj, (7, 21))
        full = exp.fit(exp.count("full"), (7, 21))
        delta = exp.delta[0]
        d.update(conj_rate=f"{fit_conj.rate:.6f}", full_rate=f"{full.rate:.6f}", ratio=f"{fit_conj.rate / delta:.4f}")
        assert abs(fit_conj.rate - LOG3 / 2) <= 0.05 * LOG3 / 2
        assert abs(full.rate - LOG3) <= 0.01 * LOG3
        assert 0.475 <= fit_conj.rate / delta <= 0.525


def test_criterion_2_pressure_equals_exponent(capsys):
    with criterion(capsys, "2 pressure zero equals critical exponent", limit=60) as d:
        shift = AugmentedShift.from_automaton(build_geodesic_acceptor(F2))
        core = scc_decompose(shift).recurrent[0]
        tree = load_config("f2_unit_tree_g_a").system()
        errs = [abs(critical_exponent(core, RoofPotential(shift, tree), n) - LOG3) for n in (1, 2, 3, 4, 5)]
        d["tree_err"] = f"{max(errs):.1e}"
        assert max(errs) <= 1e-9

        exp = Experiment(load_config("schottky_pair"))
        pot = RoofPotential(shift, exp.system)
        roots = [critical_exponent(core, pot, n) for n in (4, 5, 6)]
        gaps = [abs(b - a) for a, b in zip(roots, roots[1:])]
        fit = exp.fit(exp.count("full"), exp.cfg.fit_window)
        d.update(roots=[f"{r:.7f}" for r in roots], fit=f"{fit.rate:.5f}")
        assert gaps[1] <= gaps[0] / 2
        assert abs(fit.rate - roots[-1]) <= 0.05 * roots[-1]


def test_criterion_3_coding_certification(capsys):
    with criterion(capsys, "3 coset acceptors match the oracle to length 8", limit=30) as d:
        checked = 0
        for text in ("a", "ab", "abAB", "babABB"):
            g = F2.parse(text)
            auto = build_coset_acceptor(F2, g, verify_len=8)
            mine = set(auto.language(8))
            oracle = set(minimal_coset_representatives(F2, g, 8))
            assert mine == oracle, text
            for w in mine:
                assert fg.is_reduced(F2, w) and w[:-1] in mine
            checked += len(mine)
        d["words"] = checked
        d["mismatches"] = 0


def test_criterion_4_structure(capsys):
    with criterion(capsys, "4 block triangular form, one maximal component, m = 1") as d:
        for name in shipped_configs():
            exp = Experiment(load_config(name))
            for shift in (exp.shift, exp.coset_shift):
                cg = scc_decompose(shift)
                assert cg.is_block_lower_triangular(), name
                pot = RoofPotential(shift, exp.system)
                _, maximal = system_delta(cg, pot, 2 if exp.system.is_tree else 4)
                assert len(maximal) == 1, name
                assert maximal_path_multiplicity(cg, maximal) == 1, name
        # negative control: two equal blocks in series
        A = np.zeros((5, 5), dtype=bool)
        A[0, 1] = A[1, 0] = A[1, 2] = A[2, 3] = A[3, 2] = True
        A[:, 4] = True
        cg = scc_decompose(AugmentedShift.from_adjacency(A))
        m = maximal_path_multiplicity(cg, {cg.component_of(0).index, cg.component_of(2).index})
        d["control_m"] = m
        assert m == 2


def test_criterion_5_length_comparison(capsys):
    with criterion(capsys, "5 conjugate length comparison") as d:
        tree = Experiment(load_config("f2_unit_tree_g_a"))
        audit = tree.audit()
        assert [l for l, *_ in audit] == [1, 2, 3, 4, 5]
        assert all(e == 0.0 for _, e, _ in audit)
        sch = Experiment(load_config("schottky_pair"))
        audit = sch.audit()
        errs = [e for _, e, _ in audit]
        rho = fit_ratio(audit)
        d.update(schottky_errors=[f"{e:.2g}" for e in errs], rho=f"{rho:.3f}")
        assert [l for l, *_ in audit] == list(range(2, 9))
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert rho < 1


def test_criterion_6_lattice_dichotomy(capsys, tmp_path):
    with criterion(capsys, "6 lattice dichotomy") as d:
        shift = AugmentedShift.from_automaton(build_geodesic_acceptor(F2))
        core = scc_decompose(shift).recurrent[0]
        unit = lattice_test(core, RoofPotential(shift, load_config("f2_unit_tree_g_a").system()), 6)
        irr = lattice_test(core, RoofPotential(shift, load_config("f2_weighted_sqrt2").system()), 6)
        d.update(unit=f"{unit.verdict} b={unit.span}", sqrt2=irr.verdict)
        assert unit.arithmetic and abs(unit.span - 1.0) < 1e-9
        assert irr.verdict == "non-arithmetic"
        summary = Experiment(load_config("f2_unit_tree_g_a")).summary(ArtifactDir(tmp_path))
        assert summary["mixing_hypothesis_flag"] is True
        assert summary["lattice_verdict"] == "arithmetic"


def test_criterion_7_poincare_pole(capsys):
    with criterion(capsys, "7 simple pole of the Poincare series") as d:
        exp = Experiment(load_config("f2_unit_tree_g_a"))
        vals = exp.poincare(exp.count("full"))
        scaled = [v["scaled"] for v in vals]
        # closed form: (s - delta) eta(s) -> 4 exp(-delta) = 4/3 for the unit tree
        d["scaled"] = [f"{x:.4f}" for x in scaled]
        assert [v["offset"] for v in vals] == [0.2, 0.1, 0.05]
        assert all(v["converged"] for v in vals)
        assert all(abs(x - 4 / 3) <= 0.2 * 4 / 3 for x in scaled)
        assert max(scaled) <= 1.2 * min(scaled)
        # the truncation is negligible: compare with the closed form of the full series
        for v in vals:
            s = v["s"]
            exact = 1 + 4 * math.exp(-s) / (1 - 3 * math.exp(-s))
            assert abs(v["value"] - exact) <= 1e-6 * exact


def test_criterion_8_property_suites(capsys):
    with criterion(capsys, f"8 property suites on {CASES} seeded cases each", limit=30) as d:
        rng = np.random.default_rng(SEED)
        d["isometry"] = _isometry_cases(rng)
        d["gromov"] = _gromov_cases(rng)
        d["words"] = _word_cases(rng)
        d["birkhoff"] = _birkhoff_cases(rng)


def test_estimate_C_stabilises(capsys):
    with criterion(capsys, "C estimate stable between cylinder depths 3 and 4") as d:
        exp = Experiment(load_config("f2_unit_tree_g_a"))
        c3 = estimate_C(exp.system, exp.g, exp.coset, 3, 15, LOG3)["C"]
        c4 = estimate_C(exp.system, exp.g, exp.coset, 4, 15, LOG3)["C"]
        d.update(C3=f"{c3:.5f}", C4=f"{c4:.5f}")
        assert abs(c3 - c4) <= 0.15 * c4


# -- randomized property cases -------------------------------------------------


def _random_mobius(rng):
    while True:
        a, b, c = rng.uniform(-3, 3, 3)
        d = rng.uniform(0.2, 3)
        det = a * d - b * c
        if det > 0.2:
            return Mobius(a, b, c, d)


def _random_point(rng):
    return complex(rng.uniform(-4, 4), math.exp(rng.uniform(-3, 3)))


def _random_word(rng, max_len=10):
    return tuple(int(x) for x in rng.integers(0, 4, rng.integers(0, max_len + 1)))


def _isometry_cases(rng):
    H = HalfPlane()
    T = WeightedTree(F2, {0: 1.0, 2: math.sqrt(2.0)})
    for _ in range(CASES // 2):
        g, p, q = _random_mobius(rng), _random_point(rng), _random_point(rng)
        d0 = H.distance(p, q)
        assert abs(H.distance(g(p), g(q)) - d0) <= 1e-7 * max(1.0, d0)
    for _ in range(CASES - CASES // 2):
        g = fg.reduce_word(F2, _random_word(rng))
        p, q = (T.vertex(_random_word(rng)) for _ in range(2))
        assert abs(T.distance(T.act(g, p), T.act(g, q)) - T.distance(p, q)) <= 1e-12
    return CASES


def _gromov_cases(rng):
    H = HalfPlane()
    T = WeightedTree(F2, {0: 1.0, 2: math.sqrt(2.0)})
    for i in range(CASES):
        if i % 2:
            x, y, z, w = (_random_point(rng) for _ in range(4))
            space, tol = H, 1e-8
        else:
            x, y, z, w = (T.vertex(_random_word(rng, 8)) for _ in range(4))
            space, tol = T, 1e-12
        gp = gromov_product(space, x, y, z)
        assert -tol <= gp <= min(space.distance(x, y), space.distance(x, z)) + tol
        assert abs(gp - gromov_product(space, x, z, y)) <= tol
        # base change: (y,z)_x + (x,z)_y = d(x,y)
        assert abs(gp + gromov_product(space, y, x, z) - space.distance(x, y)) <= 4 * tol * max(1, space.distance(x, y))
        if space is T:
            assert gromov_product(T, w, x, y) >= min(gromov_product(T, w, x, z), gromov_product(T, w, z, y)) - tol
    return CASES


def _word_cases(rng):
    for _ in range(CASES):
        u, v, w = (_random_word(rng) for _ in range(3))
        r = fg.reduce_word(F2, u)
        assert fg.is_reduced(F2, r) and fg.reduce_word(F2, r) == r
        assert fg.multiply(F2, fg.multiply(F2, u, v), w) == fg.multiply(F2, u, fg.multiply(F2, v, w))
        assert fg.multiply(F2, u, fg.invert(F2, r)) == ()
        assert fg.conjugate(F2, w, fg.multiply(F2, u, v)) == fg.multiply(
            F2, fg.conjugate(F2, w, u), fg.conjugate(F2, w, v)
        )
        core, conj = fg.cyclic_reduce(F2, r)
        assert fg.multiply(F2, conj, core, fg.invert(F2, conj)) == r
    return CASES


def _birkhoff_cases(rng):
    auto = build_geodesic_acceptor(F2)
    shift = AugmentedShift.from_automaton(auto)
    systems = [load_config(n).system() for n in shipped_configs()]
    worst = 0.0
    for i in range(CASES):
        system = systems[i % len(systems)]
        w = fg.reduce_word(F2, _random_word(rng, 12))
        lhs, rhs = birkhoff_displacement_check(shift, system, auto.path(w))
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-9
    return CASES


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
