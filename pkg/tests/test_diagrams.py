import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullstate.diagrams import (INTERVAL, KINDS, OUTER, ArcDiagram, LimitSequence, allowable_sequences,
                                catalan, diagram_index, enumerate_diagrams, same_equivalence_class,
                                validate_sequence)
from nullstate.specfun import ParameterError


def all_matchings(points):
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for k, partner in enumerate(rest):
        for m in all_matchings(rest[:k] + rest[k + 1:]):
            yield ((first, partner),) + m


def noncrossing(m):
    return not any(a < c < b < d for a, b in m for c, d in m)


def brute_rule_ok(arcs, kinds):
    # independent restatement of the collapse rule, using endpoint sets
    for k in range(len(arcs) - 1):
        a, b = arcs[k]
        rest = [e for arc in arcs[k + 1:] for e in arc]
        inside = all(a < e < b for e in rest)
        outside = all(e < a or e > b for e in rest)
        if inside and kinds[k] != OUTER or outside and kinds[k] != INTERVAL:
            return False
        if not inside and not outside:
            return False
    return True


def test_catalan_values():
    assert [catalan(n) for n in range(7)] == [1, 1, 2, 5, 14, 42, 132]
    assert catalan(30) == 3814986502092304
    with pytest.raises(OverflowError):
        catalan(31)


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_size_is_catalan(n):
    ds = enumerate_diagrams(n)
    assert len(ds) == catalan(n)
    assert len({d.pairs for d in ds}) == len(ds)
    assert [d.pairs for d in ds] == sorted(d.pairs for d in ds)


@pytest.mark.parametrize("n", range(1, 5))
def test_enumeration_matches_brute_force(n):
    pts = list(range(1, 2 * n + 1))
    brute = {tuple(sorted(m)) for m in all_matchings(pts) if noncrossing(m)}
    if n == 4:
        assert sum(1 for _ in all_matchings(pts)) == 105
    assert brute == {d.pairs for d in enumerate_diagrams(n)}


def test_small_cases():
    assert [d.pairs for d in enumerate_diagrams(1)] == [((1, 2),)]
    assert [d.pairs for d in enumerate_diagrams(2)] == [((1, 2), (3, 4)), ((1, 4), (2, 3))]
    with pytest.raises(ParameterError):
        ArcDiagram(2, ((1, 3), (2, 4)))
    with pytest.raises(ParameterError):
        ArcDiagram(2, ((1, 2), (2, 3)))
    with pytest.raises(ParameterError):
        enumerate_diagrams(11)


def test_index_roundtrip():
    for k, d in enumerate(enumerate_diagrams(4)):
        assert diagram_index(d) == k


def test_two_pair_sequences():
    d1, d2 = enumerate_diagrams(2)
    s1 = allowable_sequences(d1)
    assert {(s.order, s.kinds[0]) for s in s1} == {((1, 2), INTERVAL), ((2, 1), INTERVAL)}
    s2 = allowable_sequences(d2)
    firsts = {(s.arcs()[0], s.kinds[0]) for s in s2}
    assert firsts == {((2, 3), INTERVAL), ((1, 4), OUTER)}
    assert len(s2) == 4
    (single,) = enumerate_diagrams(1)
    assert {s.kinds for s in allowable_sequences(single)} == {(INTERVAL,), (OUTER,)}


def test_validate_reports_rule():
    d2 = enumerate_diagrams(2)[1]
    bad = LimitSequence(d2, (1, 2), (INTERVAL, INTERVAL))
    v = validate_sequence(bad)
    assert not v and v.step == 0 and "outer_collapse" in v.rule
    d = ArcDiagram(3, ((1, 6), (2, 3), (4, 5)))
    v = validate_sequence(LimitSequence(d, (1, 2, 3), (OUTER, INTERVAL, INTERVAL)))
    assert v
    d = ArcDiagram(3, ((1, 2), (3, 6), (4, 5)))
    v = validate_sequence(LimitSequence(d, (2, 1, 3), (OUTER, INTERVAL, INTERVAL)))
    assert not v and "both sides" in v.rule
    for kind in KINDS:
        assert validate_sequence(LimitSequence(enumerate_diagrams(1)[0], (1,), (kind,)))


@pytest.mark.parametrize("n", range(1, 6))
def test_allowable_equals_exhaustive_search(n):
    for d in enumerate_diagrams(n):
        got = {(s.order, s.kinds) for s in allowable_sequences(d)}
        for s in allowable_sequences(d):
            assert validate_sequence(s)
        want = set()
        for order in itertools.permutations(range(1, n + 1)):
            arcs = [d.pairs[j - 1] for j in order]
            for kinds in itertools.product(KINDS, repeat=n):
                if brute_rule_ok(arcs, kinds):
                    want.add((order, kinds))
                assert bool(validate_sequence(LimitSequence(d, order, kinds))) == brute_rule_ok(arcs, kinds)
        assert got == want


seqs3 = [s for d in enumerate_diagrams(3) for s in allowable_sequences(d)]


@given(st.sampled_from(seqs3), st.sampled_from(seqs3), st.sampled_from(seqs3))
def test_equivalence_relation(a, b, c):
    assert same_equivalence_class(a, a)
    assert same_equivalence_class(a, b) == same_equivalence_class(b, a)
    if same_equivalence_class(a, b) and same_equivalence_class(b, c):
        assert same_equivalence_class(a, c)
