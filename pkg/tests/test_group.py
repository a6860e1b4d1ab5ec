import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conjcount import group as fg
from conjcount.errors import UsageError

F2 = fg.GeneratorSet(2)
raw_words = st.lists(st.integers(0, 3), max_size=12).map(tuple)


def reduced(w):
    return fg.reduce_word(F2, w)


def test_parse_and_format_roundtrip():
    assert F2.parse("abAB") == (0, 2, 1, 3)
    assert F2.format((0, 2, 1, 3)) == "abAB"
    assert F2.parse("aA") == ()
    with pytest.raises(UsageError):
        F2.parse("c")


def test_reduced_word_counts():
    # 2k (2k-1)^(n-1) reduced words of length n in F_k
    for n in range(1, 7):
        assert sum(1 for _ in fg.reduced_words(F2, n)) == 4 * 3 ** (n - 1)


def test_reduced_words_are_shortlex_sorted():
    words = list(fg.reduced_words(F2, 3))
    assert words == sorted(words, key=lambda w: fg.shortlex_key(F2, w))
    assert F2.format(words[0]) == "aaa"


def test_reduced_words_match_brute_force():
    for n in range(5):
        brute = {w for w in itertools.product(range(4), repeat=n) if fg.is_reduced(F2, w)}
        assert set(fg.reduced_words(F2, n)) == brute


def test_cyclic_reduce_and_root():
    g = F2.parse("babaB")
    core, conj = fg.cyclic_reduce(F2, g)
    assert F2.format(core) == "aba"
    assert F2.format(conj) == "b"
    assert fg.primitive_root(F2, F2.parse("abab")) == (F2.parse("ab"), 2)
    with pytest.raises(UsageError):
        fg.primitive_root(F2, ())


def test_centraliser_of_power():
    data = fg.ConjugacyData.of(F2, F2.parse("BaaaB")[::-1])
    for z in data.centraliser(F2, 12):
        assert data.commutes(F2, z)


def test_centraliser_elements_are_exactly_commuting_words():
    data = fg.ConjugacyData.of(F2, F2.parse("bab"))
    cent = set(data.centraliser(F2, 6))
    brute = {w for w in fg.reduced_words_upto(F2, 6) if data.commutes(F2, w)}
    assert cent == brute


def test_custom_order_and_bad_involution():
    gens = fg.GeneratorSet(2, order=(2, 3, 0, 1))
    assert gens.format(next(iter(fg.reduced_words(gens, 1)))) == "b"
    with pytest.raises(UsageError):
        fg.GeneratorSet(2, involution=(0, 1, 2, 3))


@given(raw_words, raw_words, raw_words)
def test_multiplication_is_associative(u, v, w):
    assert fg.multiply(F2, fg.multiply(F2, u, v), w) == fg.multiply(F2, u, fg.multiply(F2, v, w))


@given(raw_words)
def test_inverse_and_identity(w):
    r = reduced(w)
    assert fg.is_reduced(F2, r)
    assert reduced(r) == r
    assert fg.multiply(F2, r, fg.invert(F2, r)) == ()
    assert fg.multiply(F2, (), r) == r


@given(raw_words, raw_words, raw_words)
def test_conjugation_is_a_homomorphism(h, g1, g2):
    lhs = fg.conjugate(F2, h, fg.multiply(F2, g1, g2))
    rhs = fg.multiply(F2, fg.conjugate(F2, h, g1), fg.conjugate(F2, h, g2))
    assert lhs == rhs


@given(raw_words)
def test_cyclic_reduction_reassembles(w):
    g = reduced(w)
    core, conj = fg.cyclic_reduce(F2, g)
    assert fg.multiply(F2, conj, core, fg.invert(F2, conj)) == g
    if len(core) > 1:
        assert core[0] != F2.inv(core[-1])
