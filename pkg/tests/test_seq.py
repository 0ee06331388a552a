import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitrange.errors import DomainError, RepresentationError
from orbitrange.seq import (
    SelfadjointSpectrum, SpectrumSeq, greedy_interpolant, is_majorized, is_submajorized,
    rank2_reduce, tail_sum, truncate, truncate_signed,
)

F = Fraction
half = F(1, 2)


def pos(*v):
    return SpectrumSeq(tuple(v))


def sa(plus=(), minus=()):
    return SelfadjointSpectrum(SpectrumSeq(tuple(plus)), SpectrumSeq(tuple(minus)))


# -- representation ------------------------------------------------------------

def test_geometric_closed_form_trace():
    c = SpectrumSeq.geometric(1, half, head=(2,))
    assert c.trace == 3
    assert c.exact and c.rank == math.inf
    assert [c.entry(n) for n in (1, 2, 3)] == [2, half, F(1, 4)]


def test_head_must_be_nonincreasing():
    with pytest.raises(RepresentationError):
        pos(1, 2)
    with pytest.raises(RepresentationError):
        pos(1, -1)
    with pytest.raises(RepresentationError):
        SpectrumSeq.geometric(1, half, head=(F(1, 4),))


def test_float_spectrum_is_not_exact():
    assert not pos(1.0, 0.5).exact
    assert pos(1, half).exact


def test_dict_roundtrip():
    c = SpectrumSeq.geometric(1, half, head=(3, 2))
    assert SpectrumSeq.from_dict(c.to_dict()) == c
    s = sa((2, 1), (1,))
    assert SelfadjointSpectrum.from_dict(s.to_dict()) == s


def test_selfadjoint_trace_and_rank():
    s = sa((2, 1), (1,))
    assert s.trace == 2 and s.rank == 3
    assert sa((1,), ()).is_positive


# -- majorization ----------------------------------------------------------------

def test_submajorized_examples():
    assert is_submajorized(sa((1, 0.5)), sa((2, 0.1))).verdict is True
    assert is_submajorized(sa((1, half)), sa((1, half))).verdict is True
    r = is_submajorized(sa((2,)), sa((1, 1)))
    assert r.verdict is False and r.index == 1


def test_majorized_examples():
    assert is_majorized(sa((1, 1)), sa((2,))).verdict is True
    r = is_majorized(sa((1,)), sa((2,)))
    assert r.verdict is False and r.part == "trace"
    assert is_majorized(sa((1,), (1,)), sa((1,), (1,))).verdict is True


def test_submajorized_geometric_tails_certified():
    # 2^-n is dominated by 3^-n * 2 at every partial sum; decided without hitting n_max
    a = SpectrumSeq.geometric(1, half)
    b = SpectrumSeq.geometric(1, half, head=(1,))
    assert is_submajorized(a, b, n_max=5).verdict is True
    assert is_submajorized(b, a, n_max=5).verdict is False


def test_exact_comparison_has_zero_tolerance():
    eps = F(1, 10**30)
    assert is_submajorized(pos(1 + eps), pos(1)).verdict is False
    assert is_submajorized(pos(1 + 1e-15), pos(1.0)).verdict is True


# -- truncation --------------------------------------------------------------

def test_truncate_examples():
    assert truncate(pos(3, 2, 1), 2) == pos(3, 2)
    assert truncate(SpectrumSeq.geometric(1, half), 0).is_zero
    assert truncate(pos(3, 2, 1), 5) == pos(3, 2, 1)


def test_tail_sum_examples():
    assert tail_sum(pos(3, 2, 1), 1) == 3
    assert tail_sum(SpectrumSeq.geometric(1, half), 0) == 1
    assert tail_sum(pos(3, 2, 1), 3) == 0
    assert tail_sum(SpectrumSeq.geometric(1, half), 3) == F(1, 8)


def test_truncate_signed_examples():
    c = sa((1, 1), (1, 1))
    assert truncate_signed(c, 1, 2) == sa((1, 1), (1,))
    assert truncate_signed(c, 0, 0).rank == 0
    p = sa((3, 2, 1))
    assert truncate_signed(p, 0, 2).plus == truncate(p.plus, 2)
    with pytest.raises(DomainError):
        truncate_signed(c, 3, 0)


def test_rank2_reduce_examples():
    assert rank2_reduce(sa((1, 1), (1, 1))) == sa((2,), (2,))
    assert rank2_reduce(sa((2, 1))) == sa((3,))
    assert rank2_reduce(sa()).rank == 0


# -- greedy interpolant ----------------------------------------------------------

def test_greedy_interpolant_hand_example():
    k, t, y = greedy_interpolant(pos(2, 2, half), pos(3, 2, 1))
    assert (k, t, y) == (2, F(3, 4), pos(3, F(3, 2)))
    assert is_majorized(pos(2, 2, half), y)
    assert is_submajorized(y, pos(3, 2, 1))


def test_greedy_interpolant_identity_and_zero():
    c = pos(3, 2, 1)
    k, t, y = greedy_interpolant(c, c)
    assert (k, t, y) == (3, 1, c)
    k, t, y = greedy_interpolant(SpectrumSeq.zero(), c)
    assert (k, t) == (1, 0) and y.is_zero


def test_greedy_interpolant_rejects_non_submajorized():
    with pytest.raises(DomainError):
        greedy_interpolant(pos(4), pos(3, 2))


def test_greedy_interpolant_geometric_c():
    k, t, y = greedy_interpolant(pos(F(1, 4), F(1, 4), F(1, 8)), SpectrumSeq.geometric(1, half))
    # 5/8 = 1/2 + 1/8, k = 2 with s = 1/8 = t * 1/4
    assert (k, t, y) == (2, half, pos(half, F(1, 8)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=1, max_size=6),
       st.lists(st.integers(0, 20), min_size=1, max_size=6))
def test_greedy_interpolant_exact_properties(cs, xs):
    c = pos(*sorted((F(v) for v in cs), reverse=True))
    x_vals = sorted((F(v) for v in xs if v > 0), reverse=True)
    # scale x down until it is submajorized by c
    while x_vals and not is_submajorized(pos(*x_vals), c):
        x_vals = [v / 2 for v in x_vals]
    x = pos(*x_vals)
    k, t, y = greedy_interpolant(x, c)
    assert 0 <= t <= 1
    assert is_majorized(x, y) and is_submajorized(y, c)
    n = len(cs)
    lo, hi = truncate(c, k - 1), truncate(c, k)
    for j in range(1, n + 1):
        assert y.entry(j) == (1 - t) * lo.entry(j) + t * hi.entry(j)


def test_values_and_partial_sums_float_view():
    c = SpectrumSeq.geometric(1, half, head=(2,))
    np.testing.assert_allclose(c.values(4), [2, 0.5, 0.25, 0.125])
    assert c.partial_sum(2) == F(5, 2)
