"""Support functions and planar regions of orbit-closed C-numerical ranges.

For a positive trace-class ``C`` with eigenvalues ``c`` and a model ``A``,
the support function in direction ``theta`` is

    h(theta) = m * tr(c) + sum_n c_n * lambda_n((H - m)_+),

where ``H = Re(exp(-1j*theta) A)`` and ``m`` is the essential supremum of
``H``.  The supremum is attained exactly when ``rank(c)`` does not exceed
the number of eigenvalues of ``H`` at or above ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import DomainError
from .geometry import convex_hull, diameter, halfplane_polygon, hausdorff
from .opmodel import (
    BlockSlot, TailSlot, count_at_least, ess_range, ess_sup, has_spectrum_below,
    positive_part_stream, rotate_real_part,
)
from .seq import SpectrumSeq, as_positive

DEFAULT_GRID = 720
DEFAULT_TOL = 1e-9
MAX_TERMS = 1_000_000

__all__ = [
    "SupportValue", "ConvexRegion2D", "Interval", "SupportEngine", "sup_pairing",
    "support", "region", "selfadjoint_interval", "k_range", "DEFAULT_GRID", "DEFAULT_TOL",
]


@dataclass(frozen=True)
class SupportValue:
    """Value of the support function in one direction.

    The true supremum lies in ``[value, value + truncation_error]``.
    ``point`` lies in the closure of the range and satisfies
    ``Re(exp(-1j*theta) * point) == value`` up to rounding.
    """

    theta: float
    value: float
    truncation_error: float
    attained: bool
    attained_in_unitary_orbit: str
    point: complex = 0j
    terms: int = 0
    ess_sup: float = 0.0
    pairing_point: complex = 0j
    cluster_point: complex = 0j

    def to_dict(self):
        return {
            "theta": self.theta, "value": self.value,
            "truncation_error": self.truncation_error, "attained": self.attained,
            "attained_in_unitary_orbit": self.attained_in_unitary_orbit,
            "point": [self.point.real, self.point.imag], "terms": self.terms,
        }


def sup_pairing(c, a_top, tail_bound=0.0):
    """``sum_n c_n a_n`` for a nonincreasing top spectrum ``a_top``.

    Returns ``(value, error, attained)`` where ``error`` bounds the omitted
    terms by ``tail_sum(c, N) * tail_bound``.
    """
    c = as_positive(c, "c")
    a = np.asarray(a_top, dtype=float)
    N = a.size
    value = float(np.dot(c.values(N), a)) if N else 0.0
    err = float(c.tail_sum(N)) * float(tail_bound)
    return value, err, True


class _Direction:
    """Per-direction data: rotated model, essential supremum and lazy stream."""

    def __init__(self, A, theta):
        self.A = A
        self.theta = float(theta)
        self.H = rotate_real_part(A, theta)
        self.m = ess_sup(self.H)
        self._stream = positive_part_stream(self.H, self.m)
        self._values: List[float] = []
        self._points: List[complex] = []
        self._done = False
        rot = np.exp(-1j * self.theta)
        top = [f.value for f in A.tail if abs((rot * f.value).real - self.m) <= self.H.tie(self.m)]
        self.cluster_point = complex(top[0]) if top else complex(self.m * np.exp(1j * self.theta))
        self._count = None
        self._below = None

    def _z(self, entry):
        slot = entry.slot
        if isinstance(slot, TailSlot):
            return complex(self.A.tail[slot.family].entry(slot.position))
        x = self.H.eigen[1][:, slot.index]
        return complex(x.conj() @ self.A.finite_block @ x)

    def _extend(self, n):
        while not self._done and len(self._values) < n:
            try:
                entry = next(self._stream)
            except StopIteration:
                self._done = True
                break
            if entry.value <= 0.0:
                # zero eigenvalues of (H - m)_+ add nothing to the pairing
                self._done = True
                break
            self._values.append(entry.value)
            self._points.append(self._z(entry))

    def value(self, n):
        """``lambda_n((H - m)_+)`` (1-based), zero past the positive part."""
        self._extend(n)
        return self._values[n - 1] if n <= len(self._values) else 0.0

    def point(self, n):
        self._extend(n)
        return self._points[n - 1]

    @property
    def count(self):
        if self._count is None:
            self._count = count_at_least(self.H, self.m)
        return self._count

    @property
    def spectrum_below(self):
        if self._below is None:
            self._below = has_spectrum_below(self.H, self.m)
        return self._below


class SupportEngine:
    """Support-function evaluator for one model, caching per-direction work."""

    def __init__(self, A):
        if not A.tail:
            raise DomainError("finite-dimensional model has no essential spectrum")
        self.A = A
        self._cache = {}

    def direction(self, theta):
        key = float(theta)
        d = self._cache.get(key)
        if d is None:
            d = self._cache[key] = _Direction(self.A, key)
        return d

    def support(self, c, theta, tol=DEFAULT_TOL):
        if not tol > 0:
            raise DomainError("tol must be positive")
        c = as_positive(c, "c")
        theta = float(theta)
        if c.rank == 0:
            return SupportValue(theta, 0.0, 0.0, True, "yes", 0j, 0, 0.0)
        d = self.direction(theta)
        r = c.rank
        total = 0.0
        point = 0j
        n = 0
        while True:
            a_next = d.value(n + 1)
            rest = float(c.tail_sum(n))
            err = rest * a_next
            if a_next == 0.0 or n >= r or err <= tol or n >= MAX_TERMS:
                break
            cn = float(c.entry(n + 1))
            total += cn * a_next
            point += cn * d.point(n + 1)
            n += 1
        trace = float(c.trace)
        value = d.m * trace + total
        pairing = point
        point = pairing + rest * d.cluster_point
        attained = r <= d.count
        if not attained:
            unitary = "no"
        elif r != math.inf:
            unitary = "yes"
        elif d.spectrum_below:
            unitary = "no"
        else:
            unitary = "unknown"
        return SupportValue(theta, float(value), float(err), bool(attained), unitary,
                            complex(point), n, float(d.m), complex(pairing), d.cluster_point)


def support(A, c, theta, tol=DEFAULT_TOL):
    """Support value ``sup Re(exp(-1j*theta) z)`` over the range (see :class:`SupportValue`)."""
    return SupportEngine(A).support(c, theta, tol)


def grid(grid_size):
    if int(grid_size) < 3:
        raise DomainError("grid_size must be at least 3")
    return 2 * np.pi * np.arange(int(grid_size)) / int(grid_size)


@dataclass
class ConvexRegion2D:
    """Outer halfplane polygon and inner certified-point hull of a convex set."""

    directions: np.ndarray
    support: list
    outer_polygon: np.ndarray
    inner_polygon: np.ndarray
    attainment: np.ndarray
    ess_polygon: Optional[np.ndarray] = None
    hausdorff: float = field(init=False)

    def __post_init__(self):
        self.hausdorff = hausdorff(self.outer_polygon, self.inner_polygon)

    @property
    def values(self):
        return np.array([s.value for s in self.support])

    @property
    def errors(self):
        return np.array([s.truncation_error for s in self.support])

    @property
    def max_error(self):
        return float(self.errors.max(initial=0.0))

    @property
    def diameter(self):
        return diameter(self.outer_polygon)

    def hausdorff_bound(self):
        """Nominal second-order grid slack plus the certified truncation error.

        Meant for comparing two regions built on the same grid.  Against the
        true set it can be exceeded near corners whose normal cone holds no
        grid direction (a thin segment whose normal is off-grid bulges to
        first order); the measured outer/inner gap is ``hausdorff``.
        """
        g = len(self.directions)
        return self.diameter * (1 - math.cos(math.pi / g)) + self.max_error

    def to_dict(self):
        def pts(P):
            return [[float(z.real), float(z.imag)] for z in P]

        return {
            "directions": [float(t) for t in self.directions],
            "support": [float(v) for v in self.values],
            "truncation_error": [float(e) for e in self.errors],
            "attained": [bool(a) for a in self.attainment],
            "attained_in_unitary_orbit": [s.attained_in_unitary_orbit for s in self.support],
            "outer": pts(self.outer_polygon),
            "inner": pts(self.inner_polygon),
            "ess": pts(self.ess_polygon) if self.ess_polygon is not None else [],
            "hausdorff": self.hausdorff,
        }

    def csv_rows(self):
        yield ("theta", "support", "attained")
        for s in self.support:
            yield (repr(s.theta), repr(s.value), "true" if s.attained else "false")


def region_from_supports(thetas, supports, ess_polygon=None):
    h = np.array([s.value + s.truncation_error for s in supports])
    if all(s.value == 0 and s.point == 0 for s in supports) and np.allclose(h, 0):
        outer = np.zeros(1, dtype=complex)
    else:
        outer = halfplane_polygon(thetas, h)
    inner = convex_hull(np.array([s.point for s in supports]))
    att = np.array([s.attained for s in supports], dtype=bool)
    return ConvexRegion2D(np.asarray(thetas), list(supports), outer, inner, att, ess_polygon)


def region(A, c, grid_size=DEFAULT_GRID, tol=DEFAULT_TOL, engine=None):
    """Outer/inner polygon pair for the closure of the range."""
    engine = engine or SupportEngine(A)
    thetas = grid(grid_size)
    c = as_positive(c, "c")
    sups = [engine.support(c, t, tol) for t in thetas]
    return region_from_supports(thetas, sups, ess_range(A))


class Interval(NamedTuple):
    lo: float
    hi: float
    lo_attained: bool
    hi_attained: bool
    lo_unitary: str
    hi_unitary: str
    error: float


def selfadjoint_interval(A, c, tol=DEFAULT_TOL):
    """Endpoints of the (real) range of a selfadjoint model with attainment flags.

    ``lo_attained``/``hi_attained`` refer to attainment inside the orbit
    ``O(C)``; ``lo_unitary``/``hi_unitary`` to the unitary orbit ``U(C)``.
    """
    if not A.is_selfadjoint():
        raise DomainError("selfadjoint_interval needs a selfadjoint model")
    engine = SupportEngine(A)
    up = engine.support(c, 0.0, tol)
    down = engine.support(c, math.pi, tol)
    return Interval(0.0 - down.value, up.value, down.attained, up.attained,
                    down.attained_in_unitary_orbit, up.attained_in_unitary_orbit,
                    max(up.truncation_error, down.truncation_error))


def k_range(A, k, grid_size=DEFAULT_GRID, tol=DEFAULT_TOL):
    """Region of the k-numerical range (``c`` = ``k`` ones)."""
    if int(k) < 1:
        raise DomainError("k must be positive")
    return region(A, SpectrumSeq.ones(int(k)), grid_size, tol)
