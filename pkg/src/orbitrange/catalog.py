"""Fixed collection of models and orbit-sequence plans used by the checks."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .opmodel import BlockSlot, OperatorModel, TailEntryFamily as T, TailSlot
from .oracle import OrbitSequencePlan, PlanEntry
from .seq import SpectrumSeq

__all__ = ["catalog_models", "catalog_plans", "closed_model", "not_closed_model"]


def _random_block(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def closed_model():
    """``diag(2, -2) (+)`` clusters ``{1, -1}``."""
    return OperatorModel(np.diag([2.0, -2.0]), (T.exact(1.0), T.exact(-1.0)))


def not_closed_model():
    """``diag(0) (+) diag(1 - 1/(n+1))``."""
    return OperatorModel(np.diag([0.0]), (T.harmonic(1.0, -1.0, 1.0),))


def catalog_models():
    """``(name, model, spectrum)`` triples: blocks up to 6x6, one to three clusters."""
    half = Fraction(1, 2)
    third = Fraction(1, 3)
    return [
        ("disk", OperatorModel(np.array([[0, 2], [0, 0]]), (T.exact(0),)), SpectrumSeq((1,))),
        ("diag321-k2", OperatorModel(np.diag([3.0, 2.0, 1.0]), (T.exact(0),)), SpectrumSeq((1, 1))),
        ("compact-geometric", OperatorModel(np.diag([1.0, -1.0]), (
            T.harmonic(0, 1), T.harmonic(0, -1))), SpectrumSeq.geometric(1, half)),
        ("random4-three-clusters", OperatorModel(_random_block(4, 11), (
            T.exact(1), T.exact(1j), T.exact(-1))), SpectrumSeq.geometric(1, half, head=(1,))),
        ("random6-approach", OperatorModel(_random_block(6, 12, 1.5), (
            T.harmonic(0.5 + 0.5j, np.exp(0.25j * np.pi), 0.5), T.exact(-1.0))),
         SpectrumSeq((2, 1, half))),
        ("random3-geometric-tails", OperatorModel(_random_block(3, 13), (
            T.geometric(2, -1, 1.0, 0.5), T.exact(-1 + 1j), T.geometric(-1 - 1j, 1j, 0.5, 0.25))),
         SpectrumSeq.geometric(1, third)),
        ("closed-selfadjoint", closed_model(), SpectrumSeq((1,))),
        ("approach-below", not_closed_model(), SpectrumSeq((1,))),
    ]


def catalog_plans():
    """``(name, plan)`` pairs; every plan moves all of its mass into the tail."""
    dk = OperatorModel(np.array([[0, 2], [0, 0]]), (T.exact(0),))
    surrogate = OperatorModel(np.diag([1.0, -1.0]), (T.harmonic(0, 1), T.harmonic(0, -1)))
    return [
        ("rank1-approach-below", OrbitSequencePlan(
            SpectrumSeq((1,)), (PlanEntry("escaping", family=0, offset=1),), not_closed_model())),
        ("rank2-same-family", OrbitSequencePlan(
            SpectrumSeq((1, Fraction(1, 2))),
            (PlanEntry("escaping", family=0, offset=0), PlanEntry("escaping", family=0, offset=3)),
            dk)),
        ("rank2-two-families", OrbitSequencePlan(
            SpectrumSeq((1, Fraction(1, 2))),
            (PlanEntry("escaping", family=0, offset=0), PlanEntry("escaping", family=1, offset=0)),
            surrogate)),
        ("rank3-closed-model", OrbitSequencePlan(
            SpectrumSeq((2, 1, 1)),
            (PlanEntry("escaping", family=0, offset=2), PlanEntry("escaping", family=1, offset=0),
             PlanEntry("escaping", family=0, offset=5)),
            closed_model())),
    ]
