import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from orbitrange import oracle
from orbitrange.catalog import catalog_plans, not_closed_model
from orbitrange.errors import DomainError
from orbitrange.opmodel import BlockSlot, OperatorModel, TailEntryFamily as T
from orbitrange.oracle import FiniteInstance, OrbitSequencePlan, PlanEntry
from orbitrange.seq import SpectrumSeq, is_majorized


def inst(A, c):
    return FiniteInstance(np.asarray(A, dtype=complex), np.asarray(c, dtype=float))


def test_haar_unitaries_are_unitary_and_phase_uniform():
    rng = np.random.default_rng(0)
    U = oracle.haar_unitaries(4, 2000, rng)
    err = np.abs(np.einsum("bji,bjk->bik", U.conj(), U) - np.eye(4)).max()
    assert err < 1e-12
    # Haar: E|U_11|^2 = 1/n and the phase of U_11 is uniform
    assert np.mean(np.abs(U[:, 0, 0]) ** 2) == pytest.approx(0.25, abs=0.02)
    assert abs(np.mean(U[:, 0, 0] / np.abs(U[:, 0, 0]))) < 0.05


def test_cloud_of_projection_pairing():
    pts = oracle.haar_orbit_cloud(inst(np.diag([1, 0]), [1, 0]), 5000, seed=1)
    assert np.all(pts.real >= -1e-12) and np.all(pts.real <= 1 + 1e-12)
    assert np.abs(pts.imag).max() < 1e-12


def test_cloud_rayleigh_quotients_hermitian():
    rng = np.random.default_rng(2)
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = M + M.conj().T
    w = np.linalg.eigvalsh(H)
    pts = oracle.haar_orbit_cloud(inst(H, [1, 0, 0, 0]), 5000, seed=2)
    assert pts.real.min() >= w[0] - 1e-10 and pts.real.max() <= w[-1] + 1e-10


def test_cloud_is_deterministic_in_seed():
    I = inst(np.array([[0, 2], [0, 0]]), [1, 0])
    a = oracle.haar_orbit_cloud(I, 100, seed=9)
    b = oracle.haar_orbit_cloud(I, 100, seed=9, batch=7)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(a, oracle.haar_orbit_cloud(I, 100, seed=9))


def test_boundary_maximizer_examples():
    I = inst(np.diag([3, 2, 1]), [1, 1, 0])
    assert oracle.boundary_maximizer(I, 0.0).value == pytest.approx(5)
    assert oracle.boundary_maximizer(I, math.pi).value == pytest.approx(-3)
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    full = inst(A, [1, 1, 1])
    for t in np.linspace(0, 2 * np.pi, 5):
        mx = oracle.boundary_maximizer(full, t)
        assert mx.value == pytest.approx((np.exp(-1j * t) * np.trace(A)).real)
        assert mx.point == pytest.approx(np.trace(A))


def test_boundary_maximizer_matches_permutation_brute_force():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    c = np.array([2.0, 1.0, 0.5, 0.0])
    I = inst(A, c)
    for t in np.linspace(0, 2 * np.pi, 6):
        G = np.exp(-1j * t) * A
        mu = np.linalg.eigvalsh((G + G.conj().T) / 2)
        brute = max(float(np.dot(c, mu[list(p)])) for p in permutations(range(4)))
        assert oracle.boundary_maximizer(I, t).value == pytest.approx(brute, abs=1e-12)


def test_random_majorized_examples():
    np.testing.assert_array_equal(oracle.random_majorized([3, 2, 1], 0), [3, 2, 1])
    rng = np.random.default_rng(5)
    c = np.array([2.0, 1.0, 0.5, 0.0])
    X = oracle.random_majorized_batch(c, 10, 10_000, rng)
    np.testing.assert_allclose(X.sum(axis=1), c.sum(), atol=1e-12)
    for row in X[:: 50]:
        assert is_majorized(SpectrumSeq.from_values(row), SpectrumSeq.from_values(c))


def test_realize_value_boundary_and_interior():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    I = inst(A, [1.0, 0.5, 0.0, 0.0])
    z0 = oracle.boundary_maximizer(I, 0.0).point
    _, r0 = oracle.realize_value(I, z0, restarts=1)
    assert r0 <= 1e-9
    zs = [oracle.boundary_maximizer(I, t).point for t in (0.0, 2.0, 4.0)]
    _, r = oracle.realize_value(I, sum(zs) / 3, restarts=8, seed=1)
    assert r <= 1e-6


def test_realize_value_outside_lower_bound():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    I = inst(A, [1.0, 0.5, 0.0, 0.0])
    mx = oracle.boundary_maximizer(I, 0.0)
    _, r = oracle.realize_value(I, mx.point + 0.1, restarts=4)
    assert r >= 0.09


def test_hiai_nakamura_reconstruction():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        c = np.sort(rng.uniform(0.1, 2, n))[::-1]
        x = oracle.random_majorized(c, 6, rng) * rng.uniform(0.2, 1.0)
        terms, (k, t, y) = oracle.hiai_nakamura_decomposition(x, c)
        assert sum(w for w, _, _ in terms) == pytest.approx(1, abs=1e-12)
        rec = oracle.reconstruct_from_truncations(terms, c, n)
        np.testing.assert_allclose(np.sort(rec)[::-1], np.sort(x)[::-1], atol=1e-10)


def test_truncation_hull_sample_is_submajorized():
    rng = np.random.default_rng(8)
    c = np.array([1.5, 1.0, 0.25])
    for s in oracle.truncation_hull_sample(c, 200, rng):
        x = np.clip(s, 0, None)
        assert np.all(np.cumsum(x) <= np.cumsum(c) + 1e-10)


def test_extreme_points_are_permuted_truncations():
    c = [2.0, 1.0, 0.5]
    n = 3
    trunc = {tuple(np.r_[c[:m], np.zeros(n - m)][list(p)]) for m in range(n + 1)
             for p in permutations(range(n))}
    for v in trunc:
        assert oracle.is_extreme_submajorized(np.array(v), c)
    assert not oracle.is_extreme_submajorized(np.array([1.0, 1.0, 0.5]), c)
    assert not oracle.is_extreme_submajorized(np.array([1.0, 0.0, 0.0]), c)
    with pytest.raises(DomainError):
        oracle.is_extreme_submajorized(np.zeros(6), c)


def test_dichotomy_harmonic_escape():
    plan = OrbitSequencePlan(SpectrumSeq((1,)), (PlanEntry("escaping", family=0, offset=0),),
                             not_closed_model())
    rep = oracle.dichotomy_sim(plan, 1000, tol=2e-3)
    # diagonal entry at tail position k is 1 - 1/(k+1)
    for k, tr in zip(rep.ks, rep.traces):
        assert tr.real == pytest.approx(1 - 1 / (k + 1), abs=1e-15)
    assert rep.limit_trace == 0 and rep.nu == 1 and rep.branch == "ii"


def test_dichotomy_mixed_plan():
    A = OperatorModel(np.diag([2.0, -1.0]), (T.harmonic(0.5, -1, 1),))
    plan = OrbitSequencePlan(SpectrumSeq((1, Fraction(1, 2))),
                             (PlanEntry("pinned", slot=BlockSlot(0, 0.0)),
                              PlanEntry("escaping", family=0, offset=0)), A)
    rep = oracle.dichotomy_sim(plan, 10**5, tol=1e-5)
    assert rep.limit_trace == pytest.approx(2)
    assert rep.escaping_mass == 0.5 and rep.nu == pytest.approx(0.5)
    assert rep.gaps[-1] == pytest.approx(0.5 * 0.5, abs=1e-5)
    assert rep.branch == "ii"


def test_dichotomy_rejects_static_plan():
    plan = OrbitSequencePlan(SpectrumSeq((1,)), (PlanEntry("pinned", slot=BlockSlot(0, 0.0)),),
                             not_closed_model())
    with pytest.raises(DomainError):
        oracle.dichotomy_sim(plan, 10)


def test_plan_validation():
    with pytest.raises(DomainError):
        OrbitSequencePlan(SpectrumSeq((1, 1)), (PlanEntry("escaping"),), not_closed_model())
    with pytest.raises(DomainError):
        OrbitSequencePlan(SpectrumSeq((1, 1)), (PlanEntry("escaping"), PlanEntry("escaping")),
                          not_closed_model())
    with pytest.raises(DomainError):
        PlanEntry("tilted", slot=0, other=0)


def test_tail_compression_examples():
    plan = OrbitSequencePlan(SpectrumSeq((1,)), (PlanEntry("escaping", family=0, offset=0),),
                             not_closed_model())
    A = plan.model
    rep = oracle.tail_compression_check(A, plan, 4, 12)
    for k, d in zip(rep.ks, rep.differences):
        if A.tail_position(0, k) >= 4:
            assert d == 0.0
        else:
            assert d > 0
    assert rep.eventually_zero
    rep0 = oracle.tail_compression_check(A, plan, 0, 12)
    assert all(d == 0.0 for d in rep0.differences) and rep0.zero_from == 1


def test_catalog_plans_all_escape():
    for _, plan in catalog_plans():
        assert all(e.kind == "escaping" for e in plan.entries)
