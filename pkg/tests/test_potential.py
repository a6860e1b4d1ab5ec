import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conjcount import group as fg
from conjcount.coding import AugmentedShift, build_coset_acceptor, build_geodesic_acceptor, scc_decompose
from conjcount.config import load_config
from conjcount.errors import UsageError
from conjcount.potential import (
    ConstantPotential,
    CylinderPotential,
    RoofPotential,
    birkhoff_displacement_check,
    component_paths,
    fit_contraction,
    hoelder_audit,
)
from conjcount.system import GroupSystem

F2 = fg.GeneratorSet(2)
GEO = build_geodesic_acceptor(F2)
GEO_SHIFT = AugmentedShift.from_automaton(GEO)
COSET = build_coset_acceptor(F2, F2.parse("ab"))
COSET_SHIFT = AugmentedShift.from_automaton(COSET)

letters = st.lists(st.integers(0, 3), min_size=1, max_size=14).map(lambda w: fg.reduce_word(F2, w))


def test_tree_roof_is_first_letter_weight(sqrt2_tree):
    pot = RoofPotential(GEO_SHIFT, sqrt2_tree)
    path = GEO.path(F2.parse("baB"))
    assert pot.roof(path) == pytest.approx(math.sqrt(2))
    assert pot.roof(path[1:]) == pytest.approx(1.0)
    # entering the zero state ends the word
    assert pot.roof((path[-1], GEO_SHIFT.zero)) == 0.0
    with pytest.raises(UsageError):
        pot.roof((1, 2, 1))


def test_constant_potential():
    pot = ConstantPotential(GEO_SHIFT, 2.0)
    assert pot.roof((0, 1)) == 2.0
    assert pot.roof((1, GEO_SHIFT.zero)) == 0.0
    assert pot.periodic_sum((1, 1, 1)) == 6.0


@given(letters)
def test_birkhoff_identity_tree(w):
    system = GroupSystem.tree(F2, {0: 1.0, 2: math.sqrt(2.0)})
    lhs, rhs = birkhoff_displacement_check(GEO_SHIFT, system, GEO.path(w) + (GEO_SHIFT.zero,))
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(letters)
def test_birkhoff_identity_schottky(w):
    system = _schottky()
    lhs, rhs = birkhoff_displacement_check(GEO_SHIFT, system, GEO.path(w))
    assert lhs == pytest.approx(rhs, abs=1e-9)
    if COSET.accepts(w):
        lhs, rhs = birkhoff_displacement_check(COSET_SHIFT, system, COSET.path(w))
        assert lhs == pytest.approx(rhs, abs=1e-9)


_cache = {}


def _schottky():
    if "s" not in _cache:
        _cache["s"] = load_config("schottky_pair").system()
    return _cache["s"]


def test_birkhoff_rejects_paths_off_start(unit_tree):
    with pytest.raises(UsageError):
        birkhoff_displacement_check(GEO_SHIFT, unit_tree, (1, 1))


def test_hoelder_audit_tree_is_locally_constant(unit_tree):
    audit = hoelder_audit(GEO_SHIFT, unit_tree, [2, 3, 4])
    assert all(osc == 0.0 for _, osc in audit)
    assert fit_contraction(audit) == 0.0


def test_hoelder_audit_schottky_contracts(schottky):
    audit = hoelder_audit(GEO_SHIFT, schottky, [2, 3, 4, 5, 6], prefix_budget=500)
    osc = [o for _, o in audit]
    assert all(b < a for a, b in zip(osc, osc[1:]))
    assert 0 < fit_contraction(audit) < 0.6
    with pytest.raises(UsageError):
        hoelder_audit(GEO_SHIFT, schottky, [1])


def test_component_paths_and_cylinders(unit_tree):
    core = scc_decompose(GEO_SHIFT).recurrent[0]
    paths = component_paths(core, 2)
    assert len(paths) == 4 * 3 * 3
    cyl = CylinderPotential.build(RoofPotential(GEO_SHIFT, unit_tree), core, 2)
    assert set(cyl.values.values()) == {1.0}
    buf = io.StringIO()
    cyl.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "path,value" and lines[1] == "1-1-1,1"
    with pytest.raises(UsageError):
        CylinderPotential.build(RoofPotential(GEO_SHIFT, unit_tree), core, 0)


def test_periodic_sum_is_translation_length(schottky):
    pot = RoofPotential(GEO_SHIFT, schottky)
    cycle = GEO.path(F2.parse("ab"))[1:]
    assert pot.periodic_sum(cycle) == pytest.approx(schottky.element(F2.parse("ab")).translation_length())
    assert pot.periodic_sum((1,)) == pytest.approx(2 * math.log(3))
