import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wienerzp.structure import (GapDescriptor, ap_scan, blichfeldt_params, find_dilate,
                                gap_enumerate, gap_is_proper, localize, window_scale)
from wienerzp.zp_core import PrimeContext, ZpError, ZpSet, signed_reps


def dilate_oracle(p, gens, targets):
    for q in range(1, p):
        if all(abs(((q * g + p // 2) % p) - p // 2) <= t for g, t in zip(gens, targets)):
            return q
    return None


def localize_oracle(A, m):
    """(captured, q, x0) by scanning every q and every centre."""
    p = A.p
    best = (-1, 0, [])
    for q in range(1, p):
        counts = [sum(1 for a in A if abs(((q * a - c + p // 2) % p) - p // 2) <= m)
                  for c in range(p)]
        top = max(counts)
        if top > best[0]:
            best = (top, q, [c for c in range(p) if counts[c] == top])
    captured, q, good = best
    # walk the cyclic run of optimal centres that contains the smallest one
    good = set(good)
    if len(good) == p:
        return captured, q, 0
    lo = hi = min(good)
    while (lo - 1) % p in good and (lo - 1) % p != hi:
        lo = (lo - 1) % p
    while (hi + 1) % p in good and (hi + 1) % p != lo:
        hi = (hi + 1) % p
    length = (hi - lo) % p + 1
    centre = (lo + (length - 1) // 2) % p
    return captured, q, centre * pow(q, -1, p) % p


def test_gap_examples():
    ctx = PrimeContext(101)
    assert list(gap_enumerate(GapDescriptor(0, (1,), (7,)), ctx)) == list(range(7))
    P = GapDescriptor(0, (1, 10), (3, 2))
    assert list(gap_enumerate(P, ctx)) == [0, 1, 2, 10, 11, 12]
    assert P.size == 6 and gap_is_proper(P, ctx)
    assert set(gap_enumerate(GapDescriptor(1, (2,), (3,)), PrimeContext(5))) == {0, 1, 3}


def test_gap_improper_and_parse():
    ctx = PrimeContext(7)
    P = GapDescriptor(0, (1, 3), (4, 2))
    assert not gap_is_proper(P, ctx)
    assert GapDescriptor.parse("0; 1,10; 3,2") == GapDescriptor(0, (1, 10), (3, 2))
    with pytest.raises(ZpError):
        GapDescriptor.parse("0; 1,2; 3")
    with pytest.raises(ZpError):
        GapDescriptor(0, (1,), (0,))


def test_find_dilate_examples():
    assert find_dilate(PrimeContext(11), [3], [1]).q == 4
    assert find_dilate(PrimeContext(7), [1], [1]).q == 1
    assert find_dilate(PrimeContext(13), [2, 3], [6, 6]).q == 1


def test_find_dilate_validation_and_absence():
    ctx = PrimeContext(13)
    with pytest.raises(ZpError):
        find_dilate(ctx, [0], [1])
    with pytest.raises(ZpError):
        find_dilate(ctx, [1], [7])
    # |q| <= 1 and |2q| <= 1 cannot both hold
    assert find_dilate(ctx, [1, 2], [1, 1]) is None


def test_blichfeldt_params_examples():
    ctx = PrimeContext(1009)
    full = blichfeldt_params(1009, ctx, GapDescriptor(0, (1, 5), (4, 2)), 2.0)
    assert full.alphas == pytest.approx((1 / 4, 1 / 2))
    assert full.m == math.floor(2.0 * 1009)
    half = blichfeldt_params(504, ctx, GapDescriptor(0, (1,), (504,)), 1.0)
    assert half.alphas[0] == pytest.approx(504 / 1009 / 504)
    assert half.alphas[0] == pytest.approx(0.000991, abs=1e-6)
    assert window_scale(20, 1009, 0.0) == 0


def test_localize_ap_is_already_local():
    ctx = PrimeContext(101)
    loc = localize(ZpSet.from_iterable(ctx, range(5)), 3)
    assert loc.q == 1 and loc.captured == 5
    assert set(signed_reps(loc.B.members, 101)) == {-2, -1, 0, 1, 2}


def test_localize_dilated_progression():
    A = ZpSet.from_iterable(PrimeContext(31), [0, 5, 10])
    loc = localize(A, 2)
    captured, q, x0 = localize_oracle(A, 2)
    assert loc.captured == captured == 3
    assert loc.q == q == 6  # smallest q; 25 also captures all three points
    assert localize(A, 2).B == loc.B


def test_localize_full_window_and_errors():
    ctx = PrimeContext(31)
    A = ZpSet.from_iterable(ctx, [3, 17, 28])
    assert localize(A, 15).captured == 3
    with pytest.raises(ZpError):
        localize(A, 16)
    with pytest.raises(ZpError):
        localize(ZpSet.empty(ctx), 2)


def test_ap_scan_finds_dilated_progression():
    A = ZpSet.from_iterable(PrimeContext(101), [(7 * i + 3) % 101 for i in range(9)])
    P, covered = ap_scan(A)
    assert covered == 9
    assert set(gap_enumerate(P, A.context)) == set(A)


@given(st.sampled_from((5, 7, 11, 13, 17, 19, 23, 29, 31, 37)), st.data())
def test_find_dilate_matches_oracle(p, data):
    d = data.draw(st.integers(1, 3))
    gens = data.draw(st.lists(st.integers(1, p - 1), min_size=d, max_size=d))
    targets = data.draw(st.lists(st.integers(1, (p - 1) // 2), min_size=d, max_size=d))
    w = find_dilate(PrimeContext(p), gens, targets)
    expected = dilate_oracle(p, gens, targets)
    assert (w.q if w else None) == expected
    if w:
        assert all(a <= t for a, t in zip(w.achieved, targets))


@given(st.sampled_from((7, 11, 13, 17, 19)), st.data())
def test_localize_matches_oracle(p, data):
    A = ZpSet.from_iterable(PrimeContext(p), data.draw(st.sets(st.integers(0, p - 1), min_size=1, max_size=6)))
    m = data.draw(st.integers(1, (p - 1) // 2))
    loc = localize(A, m)
    captured, q, x0 = localize_oracle(A, m)
    assert (loc.captured, loc.q, loc.x0) == (captured, q, x0)
    inside = np.abs(signed_reps(loc.B.members, p)) <= m
    assert int(inside.sum()) == captured


@given(st.sampled_from((101, 211, 307)), st.data())
def test_blichfeldt_existence(p, data):
    ctx = PrimeContext(p)
    d = data.draw(st.integers(1, 3))
    widths = data.draw(st.lists(st.integers(1, 6), min_size=d, max_size=d))
    A_size = data.draw(st.integers(min(math.prod(widths), p), p))
    gens = data.draw(st.lists(st.integers(1, p - 1), min_size=d, max_size=d))
    params = blichfeldt_params(A_size, ctx, GapDescriptor(0, tuple(gens), tuple(widths)), 1.0)
    if any(a >= 1 for a in params.alphas) or math.prod(params.alphas) * p < 1:
        return
    targets = [min(max(t, 1), (p - 1) // 2) for t in params.targets]
    assert find_dilate(ctx, gens, targets) is not None
