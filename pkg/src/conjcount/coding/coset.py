"""Acceptor for shortlex-minimal representatives of the cosets ``Z(g)h``.

A reduced word ``u`` is a minimal representative when no ``z`` in the
centraliser makes ``z*u`` shortlex-smaller.  While ``u`` is read letter by
letter, each short centraliser element ``z`` is tracked as a *threat*
``(D, tail, f)``:

* ``D = |z u| - |u|``,
* ``tail`` is the part of ``z u`` beyond position ``|u|`` (its last letter
  when ``D == 0``),
* ``f`` compares the first ``|u|`` letters of ``z u`` with ``u``.

A threat only matters while the next letter cancels against its tail.  Once
a letter does not cancel, ``z u`` and ``u`` grow in lockstep and the threat
is dropped.  States are pairs (last letter, set of live threats); equal pairs
are merged.  The resulting automaton is checked against the brute-force
oracle before being returned.
"""

from __future__ import annotations

from collections import deque

from .. import group as fg
from ..errors import UnstableCodingError, UsageError
from .automaton import LabeledAutomaton

DEFAULT_STATE_BUDGET = 100_000
DEFAULT_VERIFY_LEN = 8


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def is_minimal_representative(gens: fg.GeneratorSet, data: fg.ConjugacyData, u, zs=None) -> bool:
    """Whether ``u`` is shortlex-least in ``Z(g) u``.

    Only ``|z| <= 2|u|`` can shorten ``u``; pass ``zs`` to reuse a precomputed
    centraliser list.
    """
    key = fg.shortlex_key(gens, u)
    limit = 2 * len(u)
    if zs is None:
        zs = data.centraliser(gens, limit)
    for z in zs:
        if not z or len(z) > limit:
            continue
        q = fg.multiply(gens, z, u)
        if len(q) <= len(u) and fg.shortlex_key(gens, q) < key:
            return False
    return True


def minimal_coset_representatives(gens: fg.GeneratorSet, g, max_len: int) -> list:
    """Brute-force oracle: minimal representatives of length at most ``max_len``, shortlex sorted."""
    g = fg.reduce_word(gens, g)
    if not g:
        raise UsageError("g must be a nontrivial element")
    data = fg.ConjugacyData.of(gens, g)
    zs = data.centraliser(gens, 2 * max_len)
    return [u for u in fg.reduced_words_upto(gens, max_len) if is_minimal_representative(gens, data, u, zs)]


def default_signature_radius(gens: fg.GeneratorSet, g) -> int:
    data = fg.ConjugacyData.of(gens, g)
    return 2 * (len(data.root) + 2 * len(data.conjugator) + 4)


class _ThreatMachine:
    def __init__(self, gens, data, radius):
        self.gens = gens
        self.data = data
        self.radius = radius

    def initial(self):
        threats = frozenset(
            (len(z), z, 0) for z in self.data.centraliser(self.gens, self.radius) if z
        )
        return (None, threats)

    def step(self, state, x):
        last, threats = state
        gens = self.gens
        ix = gens.inv(x)
        if last is not None and x == gens.inv(last):
            return None
        kept = []
        for d, tail, f in threats:
            if tail[-1] != ix:
                continue
            d2 = d - 2
            if d2 < 0:
                return None
            f2 = f if f else _cmp(gens.key(tail[0]), gens.key(x))
            if d2 == 0:
                if f2 < 0:
                    return None
                # f2 == 0 would mean z u x == u x, impossible for z != e
                kept.append((0, (tail[-2],), f2))
            else:
                kept.append((d2, tail[1:-1], f2))
        return (x, frozenset(kept))


def build_coset_acceptor(
    gens: fg.GeneratorSet,
    g,
    signature_radius: int | None = None,
    verify_len: int = DEFAULT_VERIFY_LEN,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> LabeledAutomaton:
    """Deterministic acceptor of the minimal representatives of ``Z(g)\\F``.

    Raises :class:`UnstableCodingError` when the state budget is exceeded or
    the language disagrees with the oracle; ``verified_len`` on the error is
    the longest length at which both agreed.
    """
    g = fg.reduce_word(gens, g)
    if not g:
        raise UsageError("g must be a nontrivial element")
    data = fg.ConjugacyData.of(gens, g)
    radius = default_signature_radius(gens, g) if signature_radius is None else int(signature_radius)
    machine = _ThreatMachine(gens, data, radius)

    start = machine.initial()
    index = {start: 0}
    states = [start]
    edges = []
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for x in gens.order:
            t = machine.step(s, x)
            if t is None:
                continue
            if t not in index:
                if len(states) >= state_budget:
                    raise UnstableCodingError(
                        f"coset acceptor exceeded {state_budget} states at radius {radius}", verified_len=-1
                    )
                index[t] = len(states)
                states.append(t)
                queue.append(t)
            edges.append((index[s], index[t], x))

    info = ["*" if last is None else f"{gens.names[last]}/{len(th)}" for last, th in states]
    auto = LabeledAutomaton(
        gens,
        len(states),
        edges,
        subgroup_tag=f"Z({gens.format(g)}) = {gens.format(data.conjugator)}<{gens.format(data.root)}>"
        f"{gens.format(fg.invert(gens, data.conjugator))}",
        state_info=info,
    )
    auto.verified_len = verify_coset_acceptor(auto, g, verify_len)
    auto.signature_radius = radius
    return auto


def verify_coset_acceptor(auto: LabeledAutomaton, g, verify_len: int) -> int:
    """Compare the language with the oracle length by length; return ``verify_len`` on success."""
    gens = auto.gens
    oracle = minimal_coset_representatives(gens, g, verify_len)
    by_len = {}
    for u in oracle:
        by_len.setdefault(len(u), set()).add(u)
    mine = {}
    for w in auto.language(verify_len):
        mine.setdefault(len(w), set()).add(w)
    for n in range(verify_len + 1):
        if by_len.get(n, set()) != mine.get(n, set()):
            extra = sorted(mine.get(n, set()) - by_len.get(n, set()))
            missing = sorted(by_len.get(n, set()) - mine.get(n, set()))
            detail = (
                f"extra {[gens.format(w) for w in extra[:3]]} missing {[gens.format(w) for w in missing[:3]]}"
            )
            raise UnstableCodingError(
                f"coset acceptor for g={gens.format(g)} disagrees with the oracle at length {n}: {detail}",
                verified_len=n - 1,
            )
    return verify_len
