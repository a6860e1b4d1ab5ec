import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conjcount import group as fg
from conjcount.errors import UsageError
from conjcount.geometry import (
    HalfPlane,
    Mobius,
    TreePoint,
    WeightedTree,
    attracting_disc,
    gromov_product,
    ping_pong_check,
    rotation_about_i,
    sample_halfplane_quadruples,
    strong_hyperbolicity_audit,
)

H = HalfPlane()
F2 = fg.GeneratorSet(2)
T = WeightedTree(F2, {0: 1.0, 2: math.sqrt(2.0)})

coords = st.floats(-5, 5, allow_nan=False)
heights = st.floats(0.05, 20, allow_nan=False)
points = st.builds(complex, coords, heights)
entries = st.floats(-4, 4, allow_nan=False)


@st.composite
def mobius(draw):
    a, b, c = draw(entries), draw(entries), draw(entries)
    d = draw(st.floats(0.3, 4))
    det = a * d - b * c
    if det <= 0.1:
        a, d = a + (1.0 - det) / d if d else a, d
        det = a * d - b * c
    if det <= 0.1:
        return Mobius(1.0, draw(entries), 0.0, 1.0)
    return Mobius(a, b, c, d)


reduced_words = st.lists(st.integers(0, 3), max_size=8).map(lambda w: fg.reduce_word(F2, w))


@st.composite
def tree_points(draw):
    w = draw(reduced_words)
    if not w:
        return TreePoint((), 0.0)
    frac = draw(st.floats(0, 0.99))
    return T.point(w, frac * T.weights[w[-1]])


def test_distance_known_values():
    assert H.distance(1j, 1j * math.e) == pytest.approx(1.0, abs=1e-15)
    assert H.distance(1j, 1j + 1e-12) == pytest.approx(1e-12, rel=1e-6)
    assert T.distance(TreePoint((), 0.0), T.vertex((0, 2))) == pytest.approx(1 + math.sqrt(2))
    # midpoint of the edge from the root to a
    assert T.distance(T.point((0,), 0.5), T.vertex((1,))) == pytest.approx(1.5)


def test_mobius_normalisation():
    m = Mobius(-2.0, 0.0, 0.0, -0.5)
    assert (m.a, m.d) == pytest.approx((1.0, 1.0)) or m.a > 0
    assert Mobius(2, 0, 0, 2).close_to(Mobius.identity())
    with pytest.raises(UsageError):
        Mobius(0, 1, 1, 0)


def test_translation_length():
    assert Mobius(3, 0, 0, 1 / 3).translation_length() == pytest.approx(2 * math.log(3))
    assert H.distance(1j, Mobius(3, 0, 0, 1 / 3)(1j)) == pytest.approx(2 * math.log(3))


def test_validation():
    with pytest.raises(UsageError):
        H.validate(1.0 + 0j)
    with pytest.raises(UsageError):
        T.validate(TreePoint((0, 1), 0.0))
    with pytest.raises(UsageError):
        WeightedTree(F2, {0: -1.0})


@given(mobius(), points, points)
def test_halfplane_isometry_invariance(g, p, q):
    assert H.distance(g(p), g(q)) == pytest.approx(H.distance(p, q), rel=1e-7, abs=1e-7)


@given(reduced_words, tree_points(), tree_points())
def test_tree_isometry_invariance(g, p, q):
    assert T.distance(T.act(g, p), T.act(g, q)) == pytest.approx(T.distance(p, q), abs=1e-12)


@given(points, points, points)
def test_gromov_product_bounds(x, y, z):
    gp = gromov_product(H, x, y, z)
    assert -1e-9 <= gp <= min(H.distance(x, y), H.distance(x, z)) + 1e-9
    assert gp == pytest.approx(gromov_product(H, x, z, y), abs=1e-12)


@given(tree_points(), tree_points(), tree_points(), tree_points())
def test_tree_is_zero_hyperbolic(w, x, y, z):
    xy = gromov_product(T, w, x, y)
    assert xy >= min(gromov_product(T, w, x, z), gromov_product(T, w, z, y)) - 1e-9


def test_strong_hyperbolicity_audit_halfplane():
    rng = np.random.default_rng(0)
    near = strong_hyperbolicity_audit(H, sample_halfplane_quadruples(rng, 300, spread=(3.0, 4.0)), R0=0.0)
    far = strong_hyperbolicity_audit(H, sample_halfplane_quadruples(rng, 300, spread=(9.0, 10.0)), R0=0.0)
    assert near.used > 100 and far.used > 100
    # the four-point defect decays exponentially in the separation
    assert far.max_violation < near.max_violation * math.exp(-4.0)
    assert far.fitted_L < 1e4


def test_strong_hyperbolicity_audit_tree_is_exact():
    rng = np.random.default_rng(1)
    samples = []
    for _ in range(200):
        base = tuple(rng.integers(0, 4, 2).tolist())
        far = tuple(rng.integers(0, 4, 8).tolist())
        x = T.vertex(base + (0,))
        z = T.vertex(base + (2,))
        y = T.vertex(base + far + (0,))
        t = T.vertex(base + far + (2,))
        samples.append((x, y, z, t))
    audit = strong_hyperbolicity_audit(T, samples, R0=2.0)
    assert audit.used > 0
    assert audit.max_violation < 1e-12


def test_ping_pong():
    a = Mobius(3, 0, 0, 1 / 3)
    b = rotation_about_i(math.pi / 4) @ a @ rotation_about_i(-math.pi / 4)
    mats = {0: a, 1: a.inverse(), 2: b, 3: b.inverse()}
    assert ping_pong_check(mats, F2)
    weak = Mobius(1.2, 0, 0, 1 / 1.2)
    wb = rotation_about_i(math.pi / 4) @ weak @ rotation_about_i(-math.pi / 4)
    assert not ping_pong_check({0: weak, 1: weak.inverse(), 2: wb, 3: wb.inverse()}, F2)
    kind, lo, hi = attracting_disc(a)
    assert kind == "out" and hi == pytest.approx(3.0)
