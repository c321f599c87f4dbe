from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsumlab.errors import CapacityError, DomainError
from hsumlab.grid import PeriodicSamples
from hsumlab.maximal import hl_maximal, level_set
from hsumlab.whitney import (CoverInterval, OpenIntervalSet, WhitneyCover, connected_components,
                             expanded_interval, integral_over, piece_decomposition, uncovered_integral,
                             verify_cover, whitney_refine)


def unit():
    return OpenIntervalSet.on_line([(0, 1)])


def test_parse_and_validation():
    G = OpenIntervalSet.parse("0,1;2,4")
    assert G.components == ((Fr(0), Fr(1)), (Fr(2), Fr(4)))
    with pytest.raises(DomainError):
        OpenIntervalSet.on_line([(0, 1), (1, 2)])       # no complement point between
    with pytest.raises(DomainError):
        OpenIntervalSet.on_line([(1, 1)])


def test_connected_components():
    assert connected_components(np.zeros(8, bool)).is_empty
    with pytest.raises(DomainError):
        connected_components(np.ones(8, bool))
    mask = np.zeros(16, bool)
    mask[2:5] = True
    mask[6:9] = True
    G = connected_components(mask)
    assert len(G) == 2
    assert G.components[1][0] - G.components[0][1] == Fr(2, 16)   # one cell gap
    # a run through the seam becomes a single wrapping component
    wrap = np.zeros(8, bool)
    wrap[[0, 1, 7]] = True
    G = connected_components(wrap)
    assert len(G) == 1 and G.components[0][1] > G.base + G.period


def test_line_mask_on_unit_interval():
    mask = np.zeros(10, bool)
    mask[0:10] = True
    G = connected_components(mask, periodic=False, left_edge=Fr(0), cell=Fr(1, 10), unit=1.0)
    assert G.components == ((Fr(0), Fr(1)),)


def test_depth_one_cover_of_unit_interval():
    cov = whitney_refine(unit(), 1)
    got = [(I.a, I.b, I.closed_left, I.closed_right) for I in cov.intervals]
    assert got == [(Fr(1, 6), Fr(1, 3), True, False), (Fr(1, 3), Fr(2, 3), True, True),
                   (Fr(2, 3), Fr(5, 6), False, True)]


@pytest.mark.parametrize("g", [0, 1, 2, 5, 9])
def test_covered_length_geometric(g):
    cov = whitney_refine(unit(), g)
    assert cov.covered_measure() == Fr(1, 3) + 2 * Fr(1, 3) * (1 - Fr(1, 2 ** g))
    assert unit().measure() - cov.covered_measure() == Fr(2, 3) / 2 ** g


def test_two_components_depth_two():
    cov = whitney_refine(OpenIntervalSet.parse("0,1;2,4"), 2)
    assert len(cov.intervals) == 10
    rep = verify_cover(cov)
    assert rep.ok and rep.distance_identity_ok


def test_verify_depth_zero_and_three():
    rep = verify_cover(whitney_refine(unit(), 0))
    assert rep.ok and rep.min_separation_ratio is None
    rep = verify_cover(whitney_refine(unit(), 3))
    assert rep.ok and rep.min_separation_ratio >= Fr(1, 2)


def test_adversarial_close_components():
    G = OpenIntervalSet.on_line([(0, 1), (Fr(9, 8), 2)])
    rep = verify_cover(whitney_refine(G, 8))
    assert rep.ok and rep.min_separation_ratio >= Fr(1, 2)


def test_verify_detects_broken_cover():
    cov = whitney_refine(unit(), 2)
    bad = list(cov.intervals)
    bad[0] = CoverInterval(Fr(0), bad[0].b, bad[0].parent, bad[0].gen, bad[0].side, True, False)
    rep = verify_cover(WhitneyCover(cov.G, bad, 2))
    assert not rep.ok and rep.failures


def test_capacity_error():
    G = OpenIntervalSet.on_line([(0, Fr(1, 3 ** 2000))])
    with pytest.raises(CapacityError):
        whitney_refine(G, 2000)


def test_jsonl_round_trip():
    cov = whitney_refine(OpenIntervalSet.parse("0,1;2,4"), 3)
    back = WhitneyCover.intervals_from_jsonl(cov.to_jsonl())
    assert back == cov.intervals


def test_expanded_interval_examples():
    G = unit()
    cov = whitney_refine(G, 1)
    central = next(I for I in cov.intervals if I.side == "C")
    e = expanded_interval(central, G)
    assert (e.a, e.b, e.closed_left, e.closed_right) == (Fr(0), Fr(2, 3), False, True)
    left = next(I for I in cov.intervals if I.side == "L")
    e = expanded_interval(left, G)
    assert (e.a, e.b, e.closed_left, e.closed_right) == (Fr(0), Fr(1, 3), False, False)
    for I in whitney_refine(G, 6).intervals:
        assert expanded_interval(I, G).length == 2 * I.length


@st.composite
def rational_sets(draw):
    k = draw(st.integers(1, 5))
    cuts = sorted(set(draw(st.lists(st.integers(0, 400), min_size=2 * k, max_size=2 * k, unique=True))))
    comps = [(Fr(cuts[i], 37), Fr(cuts[i + 1], 37)) for i in range(0, len(cuts) - 1, 2)]
    gaps_ok = all(b < a for (_, b), (a, _) in zip(comps, comps[1:]))
    return OpenIntervalSet.on_line(comps) if gaps_ok else OpenIntervalSet.on_line(comps[:1])


@settings(max_examples=40, deadline=None)
@given(rational_sets(), st.integers(0, 7))
def test_random_covers_verify(G, depth):
    rep = verify_cover(whitney_refine(G, depth))
    assert rep.ok, rep.failures


def spike_level_set(N=512, lam=2.0):
    x = PeriodicSamples(np.zeros(N)).points
    f = PeriodicSamples(np.where(np.abs(x) < 0.05, 8 * lam, 0.0))
    G = level_set(hl_maximal(f), lam)
    return f, G


def test_piece_averages_bounded():
    f, G = spike_level_set()
    assert len(G) == 1
    lam = 2.0
    cov = whitney_refine(G, 8)
    assert verify_cover(cov).ok
    pieces = piece_decomposition(f, cov, lam)
    assert all(p.ok for p in pieces)
    total = sum(p.mass for p in pieces) + uncovered_integral(f, cov)
    assert total == pytest.approx(integral_over(f, G), rel=1e-12)


def test_zero_function_pieces():
    _, G = spike_level_set()
    cov = whitney_refine(G, 4)
    pieces = piece_decomposition(PeriodicSamples(np.zeros(512)), cov, 1.0)
    assert all(p.average == 0 and p.ok for p in pieces)


def test_piece_restriction_sums_to_mass():
    f, G = spike_level_set()
    cov = whitney_refine(G, 5)
    for p in piece_decomposition(f, cov, 2.0)[:5]:
        assert p.restriction(512).l1_norm() == pytest.approx(p.mass, rel=1e-12)


def test_periodic_level_set_cover():
    # a level set straddling the seam at +-pi
    N = 256
    x = PeriodicSamples(np.zeros(N)).points
    f = PeriodicSamples(np.where(np.abs(x) > 3.0, 10.0, 0.0))
    G = level_set(hl_maximal(f), 1.0)
    assert len(G) == 1
    rep = verify_cover(whitney_refine(G, 6))
    assert rep.ok, rep.failures
