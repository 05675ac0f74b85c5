import random
from fractions import Fraction

import pytest

from antisym_ainf.ainfinity import GappedStructure, check_ainf
from antisym_ainf.formality import ScrambleProfile, scramble, torus_model
from antisym_ainf.graded import Space
from antisym_ainf.mc import (
    CandidateError, ObstructedError, check_candidate, check_gauge, deform, floer_rank,
    format_element, mc_residual, parse_element,
)
from antisym_ainf.scalars import ONE, NovElem, TruncParams, rational

from oracles import mc_dense

TR = TruncParams(3, 5)
HALF = rational("1/2")


def nov(*pairs):
    return NovElem([(rational(e), rational(c)) for e, c in pairs])


def to_dense(b):
    return {i: {Fraction(str(e)): Fraction(str(c)) for e, c in a.terms} for i, a in b.items()}


def from_residual(res):
    return {i: {Fraction(str(e)): Fraction(str(c)) for e, c in a.terms}
            for i, a in res.value.items()}


def test_flat_zero_candidate():
    _, m, _ = torus_model(2)
    res = mc_residual(m, {}, TR)
    assert res.vanishes and res.precision == TR.energy


def test_odd_candidates_on_m_infinity():
    g, m, _ = torus_model(3)
    b = {g.index("v1"): nov((HALF, 1)), g.index("v2"): nov((1, -2), (HALF, 3)),
         g.index("v3"): nov(("3/2", 1))}
    assert mc_residual(m, b, TR).vanishes
    assert mc_dense(m.entries, to_dense(b), TR.arity, TR.energy) == {}


def test_planted_symmetric_term_is_obstructed():
    g, m, _ = torus_model(2)
    v1, v2, v12 = g.index("v1"), g.index("v2"), g.index("v1.v2")
    entries = dict(m.entries)
    entries[(2, rational(1))] = {(v1, v2): {v12: ONE}, (v2, v1): {v12: ONE}}
    bad = GappedStructure(g, entries)
    b = {v1: nov((HALF, 1)), v2: nov((HALF, 1))}
    res = mc_residual(bad, b, TR)
    assert not res.vanishes
    assert from_residual(res) == mc_dense(bad.entries, to_dense(b), TR.arity, TR.energy)
    assert from_residual(res) == {v12: {Fraction(2): Fraction(2)}}


def test_residual_matches_dense_on_scrambles():
    rng = random.Random(4)
    for n in (1, 2):
        g, base, c = torus_model(n)
        m = scramble(3 + n, ScrambleProfile(), c, TR, base=base)
        gens = [g.index("v%d" % (j + 1)) for j in range(n)]
        for _ in range(3):
            b = {i: nov((rational(rng.randint(1, 4)) / 2, rng.randint(-2, 2)))
                 for i in gens}
            b = {i: a for i, a in b.items() if not a.is_zero()}
            res = mc_residual(m, b, TR)
            want = mc_dense(m.entries, to_dense(b), TR.arity, res.precision)
            assert from_residual(res) == want


def test_candidate_errors():
    g, m, _ = torus_model(2)
    with pytest.raises(CandidateError):
        check_candidate(m, {g.index("v1.v2"): nov((1, 1))})
    with pytest.raises(CandidateError):
        check_candidate(m, {g.index("v1"): nov((0, 1))})
    with pytest.raises(CandidateError):
        mc_residual(m, {99: nov((1, 1))}, TR)


def test_deform_examples():
    g, m, c = torus_model(2)
    assert deform(m, {}, TR) == m
    b = {g.index("v1"): nov((1, 1))}
    mb = deform(m, b, TR)
    assert mb.linear_part(rational(1)).is_zero()
    assert all(k != 1 for k, _ in mb.entries)
    s = scramble(9, ScrambleProfile(), c, TR, base=m)
    sb = deform(s, {g.index("v2"): nov((HALF, 1))}, TR)
    assert all(k != 0 for k, _ in sb.entries)
    # truncated deformation sums are exact only in a smaller window
    assert check_ainf(sb, TruncParams(rational("5/2"), 3)) == []


def test_gauge_examples():
    g, m, _ = torus_model(2)
    v1 = g.index("v1")
    b = {v1: nov((1, 1))}
    assert check_gauge(m, b, b, {}, TR).ok
    assert check_gauge(m, {}, {}, {0: nov((1, 5))}, TR).ok
    # m_2(b0, c) + m_2(c, b1) cancels for c a multiple of the unit
    assert check_gauge(m, b, b, {0: nov((1, 1))}, TR).ok
    r = check_gauge(m, {}, b, {0: nov((1, 1))}, TR)
    assert not r.ok
    assert not check_gauge(m, {}, b, {}, TR).ok


def test_floer_on_formal_model():
    g, m, _ = torus_model(2)
    b = {g.index("v1"): nov((HALF, 1)), g.index("v2"): nov((1, -1))}
    rep = floer_rank(m, b, TR)
    assert rep.differential_zero
    assert rep.ranks == {0: 1, 1: 2, 2: 1}


def test_floer_acyclic_and_valuation():
    sp = Space(["x", "y"], [0, 1])
    m = GappedStructure(sp, {(1, 0): {(0,): {1: ONE}}})
    rep = floer_rank(m, {}, TR)
    assert rep.ranks == {0: 0, 1: 0}
    m1 = GappedStructure(sp, {(1, 1): {(0,): {1: ONE}}})
    rep = floer_rank(m1, {}, TR)
    assert rep.ranks == {0: 0, 1: 0}
    assert rep.pivots == [(0, 1, 1)] and rep.precision == TR.energy - 1


def test_floer_rejects_obstructed():
    g, m, _ = torus_model(2)
    v1, v2, v12 = g.index("v1"), g.index("v2"), g.index("v1.v2")
    entries = dict(m.entries)
    entries[(2, rational(1))] = {(v1, v2): {v12: ONE}, (v2, v1): {v12: ONE}}
    with pytest.raises(ObstructedError):
        floer_rank(GappedStructure(g, entries), {v1: nov((HALF, 1)), v2: nov((HALF, 1))}, TR)


def test_element_text_round_trip():
    g, _, _ = torus_model(2)
    b = parse_element("v1 = 1*T^{1/2} + 3*T^{2}; v2 = -2/3*T^{1}", g)
    assert format_element(b, g) == format_element(parse_element(format_element(b, g), g), g)
    assert parse_element("0", g) == {}
    with pytest.raises(ValueError):
        parse_element("v1 1", g)
