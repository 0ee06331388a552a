import math
from fractions import Fraction

import numpy as np
import pytest

from orbitrange import oracle
from orbitrange.opmodel import OperatorModel, TailEntryFamily as T
from orbitrange.ranges import (
    SupportEngine, k_range, region, selfadjoint_interval, sup_pairing, support,
)
from orbitrange.reproductions import example_3_2_model, example_3_2_spectrum
from orbitrange.seq import SpectrumSeq

LN2 = math.log(2)
EMPTY = np.zeros((0, 0))


def test_sup_pairing_examples():
    v, err, att = sup_pairing(SpectrumSeq((2, 1)), [3, 1])
    assert (v, err) == (7, 0)
    v, err, att = sup_pairing(SpectrumSeq((1,)), [0, 0, 0])
    assert v == 0


def test_sup_pairing_ln2_with_certified_tail():
    c = SpectrumSeq.geometric(1, Fraction(1, 2))
    a = [1 / n for n in range(1, 41)]
    v, err, _ = sup_pairing(c, a, tail_bound=a[-1])
    assert err < 1e-9
    assert v <= LN2 <= v + err + 1e-15


def test_support_examples():
    sv = support(OperatorModel(EMPTY, (T.exact(1), T.exact(-1))), SpectrumSeq((1,)), 0.0)
    assert sv.value == pytest.approx(1) and sv.attained
    sv = support(OperatorModel(np.diag([3.0, 2.0, 1.0]), (T.exact(0),)), SpectrumSeq((1, 1)), 0.0)
    assert sv.value == pytest.approx(5) and sv.attained
    assert sv.attained_in_unitary_orbit == "yes"


def test_support_example_3_2():
    sv = support(example_3_2_model(), example_3_2_spectrum(), 0.0, 1e-10)
    assert abs(sv.value - LN2) <= 1e-9 and sv.truncation_error <= 1e-9
    assert sv.attained and sv.attained_in_unitary_orbit == "no"


def test_support_point_lies_on_support_line():
    A = OperatorModel(np.array([[1, 2j], [0.5, -1]]), (T.harmonic(0.3j, 1, 0.5), T.exact(-0.5)))
    c = SpectrumSeq((2, 1, Fraction(1, 2)))
    for t in np.linspace(0, 2 * np.pi, 9):
        sv = support(A, c, t, 1e-10)
        assert (np.exp(-1j * t) * sv.point).real == pytest.approx(sv.value, abs=1e-9)


def test_region_segment():
    R = region(OperatorModel(EMPTY, (T.exact(1), T.exact(-1))), SpectrumSeq((1,)), 360)
    assert np.abs(R.outer_polygon.imag).max() <= 1e-8
    assert R.outer_polygon.real.min() == pytest.approx(-1)
    assert R.outer_polygon.real.max() == pytest.approx(1)


def test_region_zero_spectrum_is_origin():
    A = OperatorModel(np.array([[1, 2], [3, 4j]]), (T.exact(1),))
    R = region(A, SpectrumSeq.zero(), 90)
    assert np.abs(R.outer_polygon).max() <= 1e-12


def test_region_disk_against_haar_cloud():
    A = OperatorModel(np.array([[0, 2], [0, 0]]), (T.exact(0),))
    R = region(A, SpectrumSeq((1,)), 720)
    circle = np.exp(2j * np.pi * np.arange(2000) / 2000)
    from orbitrange.geometry import hausdorff

    assert hausdorff(R.outer_polygon, circle) <= 1e-3
    inst = oracle.FiniteInstance(np.array([[0, 2], [0, 0]]), np.array([1.0, 0.0]))
    cloud = oracle.haar_orbit_cloud(inst, 20_000, seed=3)
    assert np.abs(cloud).max() <= 1 + 1e-9
    assert np.abs(cloud).max() >= 0.99


def test_region_hausdorff_within_bound():
    A = OperatorModel(np.array([[0, 2], [0, 0]]), (T.exact(0),))
    R = region(A, SpectrumSeq((1,)), 720)
    assert R.hausdorff <= R.hausdorff_bound()
    rows = list(R.csv_rows())
    assert rows[0] == ("theta", "support", "attained")
    assert len(rows) == 721


def test_selfadjoint_interval_examples():
    below = OperatorModel(np.diag([0.0]), (T.harmonic(1, -1, 1),))
    iv = selfadjoint_interval(below, SpectrumSeq((1,)))
    assert (iv.lo, iv.hi, iv.lo_attained, iv.hi_attained) == (0, 1, True, False)
    iv = selfadjoint_interval(OperatorModel(np.diag([2.0]), (T.exact(0),)), SpectrumSeq((1,)))
    assert (iv.lo, iv.hi, iv.lo_attained, iv.hi_attained) == (0, 2, True, True)
    iv = selfadjoint_interval(example_3_2_model(), example_3_2_spectrum(), 1e-10)
    assert iv.hi == pytest.approx(LN2, abs=1e-9) and iv.lo == pytest.approx(-LN2, abs=1e-9)
    assert (iv.lo_unitary, iv.hi_unitary) == ("no", "no")


def test_k_range_examples():
    A = OperatorModel(np.diag([3.0, 2.0, 1.0]), (T.exact(0),))
    R = k_range(A, 2, 360)
    assert R.support[0].value == pytest.approx(5)
    assert np.abs(R.outer_polygon.imag).max() <= 1e-9
    # off-grid normals: the outer polygon of a segment bulges by (L/2) tan(step/2)
    R90 = k_range(A, 2, 90)
    assert np.abs(R90.outer_polygon.imag).max() == pytest.approx(2.5 * math.tan(math.pi / 90))
    R3 = k_range(A, 3, 90)
    assert R3.support[0].value == pytest.approx(6) and R3.support[0].attained
    R1 = k_range(OperatorModel(EMPTY, (T.exact(1), T.exact(-1))), 1, 90)
    assert R1.outer_polygon.real.min() == pytest.approx(-1)


def test_engine_matches_dense_truncation_oracle():
    # finite rank c against a geometric-tail model: compare with a large dense truncation
    A = OperatorModel(np.array([[0.5, 1j], [0.2, -0.3]]),
                      (T.geometric(0.2, 1, 0.5, 0.5), T.exact(-0.4)))
    c = SpectrumSeq((1, Fraction(1, 2), Fraction(1, 4)))
    eng = SupportEngine(A)
    D = A.dense(200)
    for t in np.linspace(0, 2 * np.pi, 7):
        G = np.exp(-1j * t) * D
        mu = np.linalg.eigvalsh((G + G.conj().T) / 2)[::-1]
        ess = max((np.exp(-1j * t) * f.value).real for f in A.tail)
        # pairing with eigenvalues clipped below at the ess sup (mass parked on the cluster)
        top = np.maximum(mu[:3], ess)
        expected = float(np.dot([1, 0.5, 0.25], top))
        assert eng.support(c, t, 1e-12).value == pytest.approx(expected, abs=1e-9)
