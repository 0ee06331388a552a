"""Eigenvalue sequences of trace-class operators and (sub)majorization.

A positive trace-class spectrum is stored as a finite nonincreasing head
followed by an optional geometric tail, which keeps partial sums, tail sums
and traces available in closed form.  Selfadjoint spectra are pairs of such
sequences (the positive and negative parts), so no modulus ordering of
signed eigenvalues is ever needed.

Values given as ``int``/``Fraction`` are kept exact and compared with zero
tolerance; as soon as a float is involved the predicates use a relative
tolerance of ``1e-12``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from numbers import Rational
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, RepresentationError
from .serial import format_real, parse_real

Real = Union[float, Fraction]

FLOAT_TOL = 1e-12
STEP_CAP = 1_000_000

__all__ = [
    "GeometricTail", "SpectrumSeq", "SelfadjointSpectrum", "Comparison",
    "Interpolant", "is_submajorized", "is_majorized", "truncate", "tail_sum",
    "truncate_signed", "rank2_reduce", "greedy_interpolant",
]


def _is_exact(x):
    return isinstance(x, Rational)


@dataclass(frozen=True)
class GeometricTail:
    """Entries ``a * r**j`` for ``j = 1, 2, ...`` following the head."""

    a: Real
    r: Real

    def __post_init__(self):
        if not (0 < self.r < 1):
            raise RepresentationError(f"tail ratio must lie in (0, 1), got {self.r}")
        if self.a < 0:
            raise RepresentationError(f"tail coefficient must be >= 0, got {self.a}")


@dataclass(frozen=True)
class SpectrumSeq:
    """Nonincreasing summable nonnegative sequence ``head + geometric tail``.

    Indices in the public methods are 1-based, matching the usual
    ``lambda_1 >= lambda_2 >= ...`` convention.
    """

    head: tuple = ()
    tail: Optional[GeometricTail] = None

    def __post_init__(self):
        head = tuple(self.head)
        tail = self.tail
        if tail is not None and not isinstance(tail, GeometricTail):
            tail = GeometricTail(*tail)
        if tail is not None and tail.a == 0:
            tail = None
        values = list(head) + ([tail.a, tail.r] if tail is not None else [])
        exact = all(_is_exact(v) for v in values)
        if exact:
            head = tuple(Fraction(v) for v in head)
            if tail is not None:
                tail = GeometricTail(Fraction(tail.a), Fraction(tail.r))
        else:
            head = tuple(float(v) for v in head)
            if tail is not None:
                tail = GeometricTail(float(tail.a), float(tail.r))
        for i, v in enumerate(head):
            if not math.isfinite(v):
                raise RepresentationError(f"head[{i}] is not finite")
            if v < 0:
                raise RepresentationError(f"head[{i}] = {v} is negative")
            if i and v > head[i - 1]:
                raise RepresentationError(
                    f"head is not nonincreasing at index {i} ({head[i - 1]} < {v})")
        if tail is not None and head and head[-1] < tail.a * tail.r:
            raise RepresentationError("last head entry is smaller than the first tail entry")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "exact", exact)

    exact: bool = field(init=False, repr=False, compare=False, default=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def geometric(cls, a, r, head=()):
        return cls(tuple(head), GeometricTail(a, r))

    @classmethod
    def ones(cls, k):
        return cls((Fraction(1),) * int(k))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def from_values(cls, values):
        """Sort arbitrary nonnegative values into a head-only sequence."""
        return cls(tuple(sorted(values, reverse=True)))

    # -- closed forms -----------------------------------------------------
    @cached_property
    def _prefix(self):
        zero = Fraction(0) if self.exact else 0.0
        return [zero] + list(accumulate(self.head))

    @cached_property
    def _suffix(self):
        zero = Fraction(0) if self.exact else 0.0
        return list(accumulate(reversed(self.head), initial=zero))[::-1]

    def _tail_total(self):
        if self.tail is None:
            return Fraction(0) if self.exact else 0.0
        a, r = self.tail.a, self.tail.r
        return a * r / (1 - r)

    @property
    def trace(self):
        if self.tail is None:
            return self._prefix[-1]
        return self._prefix[-1] + self._tail_total()

    @property
    def rank(self):
        if self.tail is not None:
            return math.inf
        return sum(1 for v in self.head if v != 0)

    @property
    def is_zero(self):
        return self.rank == 0

    def entry(self, n):
        """The ``n``-th entry (1-based); zero beyond the support."""
        if n < 1:
            raise IndexError("entries are 1-based")
        L = len(self.head)
        if n <= L:
            return self.head[n - 1]
        if self.tail is None:
            return Fraction(0) if self.exact else 0.0
        return self.tail.a * self.tail.r ** (n - L)

    def entries(self, n):
        return [self.entry(i) for i in range(1, n + 1)]

    def values(self, n):
        """First ``n`` entries as a float array."""
        return np.array([float(v) for v in self.entries(n)], dtype=float)

    def partial_sum(self, n):
        """``sum_{k <= n} lambda_k``."""
        return self.trace - self.tail_sum(n) if n > len(self.head) else self._prefix[max(n, 0)]

    def tail_sum(self, m):
        """``sum_{k > m} lambda_k`` in closed form."""
        m = max(int(m), 0)
        L = len(self.head)
        if m <= L:
            return self._suffix[m] + self._tail_total()
        if self.tail is None:
            return Fraction(0) if self.exact else 0.0
        a, r = self.tail.a, self.tail.r
        return a * r ** (m - L + 1) / (1 - r)

    def support_length(self):
        """Number of explicitly stored entries after dropping trailing zeros."""
        n = len(self.head)
        while n and self.head[n - 1] == 0:
            n -= 1
        return n

    # -- serialization ----------------------------------------------------
    def to_dict(self):
        tail = None
        if self.tail is not None:
            tail = {"a": format_real(self.tail.a), "r": format_real(self.tail.r)}
        return {"head": [format_real(v) for v in self.head], "tail": tail}

    @classmethod
    def from_dict(cls, data, location="spectrum"):
        from .errors import ConfigError

        if not isinstance(data, dict):
            raise ConfigError(location, "expected an object with 'head' and 'tail'")
        unknown = set(data) - {"head", "tail"}
        if unknown:
            raise ConfigError(location, f"unexpected keys {sorted(unknown)}")
        head = data.get("head", [])
        if not isinstance(head, list):
            raise ConfigError(f"{location}.head", "expected a list")
        head = tuple(parse_real(v, f"{location}.head[{i}]") for i, v in enumerate(head))
        tail = data.get("tail")
        if tail is not None:
            if not isinstance(tail, dict) or set(tail) != {"a", "r"}:
                raise ConfigError(f"{location}.tail", "expected {'a': ..., 'r': ...} or null")
            tail = GeometricTail(parse_real(tail["a"], f"{location}.tail.a"),
                                 parse_real(tail["r"], f"{location}.tail.r"))
        try:
            return cls(head, tail)
        except RepresentationError as exc:
            raise ConfigError(location, str(exc)) from exc


@dataclass(frozen=True)
class SelfadjointSpectrum:
    """Positive and negative eigenvalue parts of a selfadjoint trace-class operator."""

    plus: SpectrumSeq = SpectrumSeq()
    minus: SpectrumSeq = SpectrumSeq()

    def __post_init__(self):
        for name in ("plus", "minus"):
            value = getattr(self, name)
            if not isinstance(value, SpectrumSeq):
                object.__setattr__(self, name, SpectrumSeq(tuple(value)))

    @classmethod
    def positive(cls, seq):
        return cls(seq, SpectrumSeq())

    @property
    def exact(self):
        return self.plus.exact and self.minus.exact

    @property
    def trace(self):
        return self.plus.trace - self.minus.trace

    @property
    def rank(self):
        return self.plus.rank + self.minus.rank

    @property
    def is_positive(self):
        return self.minus.is_zero

    def to_dict(self):
        return {"plus": self.plus.to_dict(), "minus": self.minus.to_dict()}

    @classmethod
    def from_dict(cls, data, location="spectrum"):
        from .errors import ConfigError

        if not isinstance(data, dict) or set(data) - {"plus", "minus"} or "plus" not in data:
            raise ConfigError(location, "expected an object with 'plus' and 'minus'")
        plus = SpectrumSeq.from_dict(data["plus"], f"{location}.plus")
        minus = SpectrumSeq.from_dict(data.get("minus", {"head": [], "tail": None}),
                                      f"{location}.minus")
        return cls(plus, minus)


def as_selfadjoint(x):
    if isinstance(x, SelfadjointSpectrum):
        return x
    if isinstance(x, SpectrumSeq):
        return SelfadjointSpectrum.positive(x)
    raise TypeError(f"expected a spectrum, got {type(x).__name__}")


def as_positive(x, what="spectrum"):
    """Return the positive part, raising if the spectrum has a negative part."""
    if isinstance(x, SpectrumSeq):
        return x
    x = as_selfadjoint(x)
    if not x.is_positive:
        raise DomainError(f"{what} must be positive (its negative part is nonzero)")
    return x.plus


@dataclass(frozen=True)
class Comparison:
    """Outcome of a (sub)majorization test.

    ``verdict`` is ``True``, ``False`` or ``None`` (inconclusive).  On failure
    ``index`` is the first violated partial sum and ``part`` is ``"plus"``,
    ``"minus"`` or ``"trace"``.
    """

    verdict: Optional[bool]
    index: Optional[int] = None
    part: Optional[str] = None

    def __bool__(self):
        return self.verdict is True


def _tolerance(*spectra):
    if all(s.exact for s in spectra):
        return 0
    scale = sum(float(s.plus.trace) + float(s.minus.trace) for s in spectra)
    return FLOAT_TOL * max(1.0, scale)


def _cast(x, exact):
    return x if exact else float(x)


def _dominated(x, y, n_max, tol):
    """Decide ``sum_{k<=n} x_k <= sum_{k<=n} y_k + tol`` for every ``n``.

    Returns ``(verdict, first_violation)``.
    """
    exact = x.exact and y.exact
    N0 = max(len(x.head), len(y.head))
    if x.tail is None and y.tail is None:
        N1 = N0
    else:
        N1 = max(N0, int(n_max))
    sx = sy = Fraction(0) if exact else 0.0
    for n in range(1, N1 + 1):
        sx += _cast(x.entry(n), exact)
        sy += _cast(y.entry(n), exact)
        if sx > sy + tol:
            return False, n
    if x.tail is None and y.tail is None:
        return True, None
    # Beyond N1 both sequences are geometric (or zero):
    #   D(n) = (Ty - Tx) - Ry(n) + Rx(n),  R = tail sums.
    tx, ty = _cast(x.trace, exact), _cast(y.trace, exact)
    delta = ty - tx
    rx = x.tail.r if x.tail is not None else 0
    ry = y.tail.r if y.tail is not None else 0
    for n in range(N1, N1 + STEP_CAP):
        Rx = _cast(x.tail_sum(n), exact)
        Ry = _cast(y.tail_sum(n), exact)
        if n > N1 and delta - Ry + Rx < -tol:
            return False, n
        if delta - Ry >= -tol:
            return True, None
        if delta >= -tol and rx >= ry and Rx >= Ry:
            return True, None
    return None, None


def is_submajorized(a, b, n_max=1000):
    """Test ``a`` weakly submajorized by ``b`` on both the positive and negative parts."""
    if n_max < 1:
        raise DomainError("n_max must be a positive integer")
    a, b = as_selfadjoint(a), as_selfadjoint(b)
    tol = _tolerance(a, b)
    inconclusive = False
    for part in ("plus", "minus"):
        verdict, n = _dominated(getattr(a, part), getattr(b, part), n_max, tol)
        if verdict is False:
            return Comparison(False, n, part)
        if verdict is None:
            inconclusive = True
    return Comparison(None) if inconclusive else Comparison(True)


def is_majorized(a, b, n_max=1000):
    """Submajorization plus equality of the (signed) traces."""
    result = is_submajorized(a, b, n_max)
    if result.verdict is not True:
        return result
    a, b = as_selfadjoint(a), as_selfadjoint(b)
    tol = _tolerance(a, b)
    exact = a.exact and b.exact
    if abs(_cast(a.trace, exact) - _cast(b.trace, exact)) > tol:
        return Comparison(False, None, "trace")
    return Comparison(True)


def truncate(c, m):
    """Keep the ``m`` largest entries of a positive spectrum."""
    c = as_positive(c)
    m = int(m)
    if m < 0:
        raise DomainError("m must be nonnegative")
    if m >= c.rank:
        return c
    if m <= len(c.head):
        return SpectrumSeq(c.head[:m])
    return SpectrumSeq(tuple(c.entries(m)))


def tail_sum(c, m):
    return as_positive(c).tail_sum(m)


def truncate_signed(c, m_minus, m_plus):
    """Keep the ``m_plus`` largest positive and ``m_minus`` largest negative parts."""
    c = as_selfadjoint(c)
    if m_plus > c.plus.rank or m_minus > c.minus.rank or m_plus < 0 or m_minus < 0:
        raise DomainError(
            f"truncation ({m_minus}, {m_plus}) exceeds ranks ({c.minus.rank}, {c.plus.rank})")
    return SelfadjointSpectrum(truncate(c.plus, m_plus), truncate(c.minus, m_minus))


def rank2_reduce(c):
    """Spectrum of ``diag(tr C_+, -tr C_-, 0, ...)``, which majorizes ``c``."""
    c = as_selfadjoint(c)
    plus = SpectrumSeq((c.plus.trace,)) if c.plus.trace != 0 else SpectrumSeq(())
    minus = SpectrumSeq((c.minus.trace,)) if c.minus.trace != 0 else SpectrumSeq(())
    return SelfadjointSpectrum(plus, minus)


class Interpolant(NamedTuple):
    k: int
    t: Real
    y: SpectrumSeq


def greedy_interpolant(x, c):
    """Spectrum ``y`` with ``x`` majorized by ``y`` and ``y`` submajorized by ``c``.

    ``y = (c_1, ..., c_{k-1}, s)`` where ``k`` is the first index whose partial
    sum of ``c`` reaches ``tr x`` and ``s = tr x - sum_{n<k} c_n``.  Entrywise
    ``y = (1 - t) * truncate(c, k-1) + t * truncate(c, k)`` with ``t = s / c_k``.
    """
    x, c = as_positive(x, "x"), as_positive(c, "c")
    if x.tail is not None:
        raise DomainError("x must have a finite head-only representation")
    verdict = is_submajorized(x, c)
    if verdict.verdict is not True:
        raise DomainError(f"x is not submajorized by c (violation at n={verdict.index})")
    exact = x.exact and c.exact
    T = _cast(x.trace, exact)
    if T == 0:
        zero = Fraction(0) if exact else 0.0
        return Interpolant(1, zero, SpectrumSeq(()))
    prev = Fraction(0) if exact else 0.0
    limit = c.rank if c.rank != math.inf else STEP_CAP
    for k in range(1, int(limit) + 1):
        ck = _cast(c.entry(k), exact)
        cur = prev + ck
        if cur >= T or k == limit:
            break
        prev = cur
    else:  # pragma: no cover - only reached for an empty c, excluded above
        raise DomainError("c has no support")
    if cur < T and c.rank == math.inf:
        raise DomainError("could not locate the interpolation index within the step cap")
    s = T - prev
    s = min(max(s, 0 * s), ck)
    t = s / ck
    head = tuple(_cast(v, exact) for v in c.entries(k - 1))
    y = SpectrumSeq(head + ((s,) if s != 0 else ()))
    return Interpolant(k, t, y)
