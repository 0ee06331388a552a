"""Worked examples: an indefinite ``C`` where the naive hull formula fails,
a strictly positive ``C`` against a compact selfadjoint ``A`` (the unitary
orbit range is an open interval), and a k-numerical range instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

import numpy as np

from .closure import closure_rhs
from .opmodel import OperatorModel, TailEntryFamily, count_at_least, rotate_real_part
from .oracle import sorted_pairing
from .ranges import region, selfadjoint_interval, support
from .seq import SelfadjointSpectrum, SpectrumSeq, truncate_signed

TRUNCATIONS = (250, 500, 1000, 2000)

__all__ = [
    "example_3_1", "example_3_2", "k_range_example", "example_3_1_model",
    "example_3_2_model", "example_3_2_spectrum", "Component", "Example31Report",
]


def example_3_1_model():
    """``A = B (+) -B`` with ``B = diag(1, 1 - 1/2, 1 - 1/3, ...)``."""
    return OperatorModel(np.diag([1.0, -1.0]), (
        TailEntryFamily.harmonic(1.0, -1.0, 1.0),
        TailEntryFamily.harmonic(-1.0, 1.0, 1.0),
    ))


def _b_truncation(N):
    """First ``N`` diagonal entries of ``B``."""
    return np.concatenate([[1.0], 1.0 - 1.0 / np.arange(2, N + 1)])


@dataclass
class Component:
    label: str
    m_minus: int
    m_plus: int
    expected: tuple            # (lo, hi) of the base interval
    expected_open: bool
    tail: int                  # |tr(C - C_{m-,m+})|
    sup_by_n: List[float] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    extrapolated: float = 0.0
    attained: bool = True
    monotone: bool = True

    @property
    def interval(self):
        lo, hi = self.expected
        return lo - self.tail, hi + self.tail

    def render(self):
        lo, hi = self.expected
        br = ("(", ")") if not self.attained else ("[", "]")
        base = f"{br[0]}{lo:g},{hi:g}{br[1]}" if lo != hi else f"{{{lo:g}}}"
        return f"{base} + {self.tail}*[-1,1]"

    def to_dict(self):
        return {
            "label": self.label, "m_minus": self.m_minus, "m_plus": self.m_plus,
            "expected": list(self.expected), "tail": self.tail, "sup_by_n": self.sup_by_n,
            "errors": self.errors, "extrapolated": self.extrapolated, "attained": self.attained,
            "expected_open": self.expected_open, "monotone": self.monotone,
            "set": self.render(),
        }


@dataclass
class Example31Report:
    components: List[Component]
    truncations: tuple
    union: tuple
    union_closed: bool

    def to_dict(self):
        return {"components": [c.to_dict() for c in self.components],
                "truncations": list(self.truncations), "union": list(self.union),
                "union_closed": self.union_closed}


# (label, m_minus, m_plus, expected interval, expected open)
_EXPECTED_3_1 = [
    ("C_{2,2}", 2, 2, (-4.0, 4.0), True),
    ("C_{2,1}", 1, 2, (-3.0, 3.0), True),
    ("C_{1,1}", 1, 1, (-2.0, 2.0), False),
    ("C_{1,0}", 0, 1, (-1.0, 1.0), False),
    ("C_{0,0}", 0, 0, (0.0, 0.0), False),
]


def example_3_1(truncations=TRUNCATIONS):
    """Components of the naive signed hull formula for ``C = diag(1,1,-1,-1,0,...)``.

    Suprema come from sorted pairings on ``N x N`` truncations of each
    summand of ``A``; attainment comes from counting eigenvalues of ``A`` at
    its essential supremum (and of ``-A`` for the negative part).
    """
    A = example_3_1_model()
    C = SelfadjointSpectrum(SpectrumSeq((1, 1)), SpectrumSeq((1, 1)))
    top = count_at_least(rotate_real_part(A, 0.0), 1.0)
    bottom = count_at_least(rotate_real_part(A, math.pi), 1.0)
    comps = []
    for label, mm, mp, expected, is_open in _EXPECTED_3_1:
        Cm = truncate_signed(C, mm, mp)
        c_vals = ([float(v) for v in Cm.plus.head], [float(v) for v in Cm.minus.head])
        tail = abs(int(C.trace - Cm.trace))
        sups = []
        for N in truncations:
            b = _b_truncation(N)
            eig = np.concatenate([b, -b])
            c_fin = np.concatenate([c_vals[0], np.zeros(eig.size - len(c_vals[0]) - len(c_vals[1])),
                                    -np.array(c_vals[1])])
            sups.append(sorted_pairing(c_fin, eig))
        hi = expected[1]
        errors = [abs(hi - s) for s in sups]
        extrap = 2 * sups[-1] - sups[-2] if len(sups) > 1 else sups[-1]
        monotone = all(e2 <= e1 for e1, e2 in zip(errors, errors[1:]))
        attained = len(c_vals[0]) <= top and len(c_vals[1]) <= bottom
        comps.append(Component(label, mm, mp, expected, is_open, tail, sups, errors,
                               float(extrap), bool(attained), bool(monotone)))
    hi = max(c.interval[1] for c in comps)
    lo = min(c.interval[0] for c in comps)
    closed = any(c.attained and c.interval[1] == hi for c in comps)
    return Example31Report(comps, tuple(truncations), (lo, hi), bool(closed))


def example_3_2_model():
    """``diag(1/n) (+) diag(-1/n)``: a ``+-1`` block plus harmonic families at 0."""
    return OperatorModel(np.diag([1.0, -1.0]), (
        TailEntryFamily.harmonic(0.0, 1.0, 1.0),
        TailEntryFamily.harmonic(0.0, -1.0, 1.0),
    ))


def example_3_2_spectrum():
    """``lambda_n = 2**-n``."""
    return SpectrumSeq.geometric(1, Fraction(1, 2))


@dataclass
class Example32Report:
    lo: float
    hi: float
    error: float
    unitary_lo: str
    unitary_hi: str
    orbit_lo: bool
    orbit_hi: bool
    closure: tuple

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi, "certified_error": self.error,
                "attained_in_unitary_orbit": {"theta=pi": self.unitary_lo, "theta=0": self.unitary_hi},
                "attained_in_orbit": {"theta=pi": self.orbit_lo, "theta=0": self.orbit_hi},
                "closure": list(self.closure)}


def example_3_2(tol=1e-10, grid_size=72):
    A = example_3_2_model()
    c = example_3_2_spectrum()
    iv = selfadjoint_interval(A, c, tol)
    rhs = closure_rhs(A, c, tol, grid_size)
    xs = rhs.outer_polygon.real
    return Example32Report(iv.lo, iv.hi, iv.error, iv.lo_unitary, iv.hi_unitary,
                           iv.lo_attained, iv.hi_attained, (float(xs.min()), float(xs.max())))


def k_range_model():
    return OperatorModel(np.diag([3.0, 2.0, 1.0]), (TailEntryFamily.exact(0.0),))


def k_range_example(k=2, grid_size=360, tol=1e-9):
    A = k_range_model()
    c = SpectrumSeq.ones(k)
    up = support(A, c, 0.0, tol)
    R = region(A, c, grid_size, tol)
    return up, R
