"""Operator models ``A = F (+) D``: a finite complex block plus a diagonal tail.

The diagonal tail is a finite list of entry families.  Each family either
repeats a cluster value with infinite multiplicity (``exact``) or generates
entries ``value + w*g(n)``, ``n >= 1``, that converge to the cluster value
(``approach``), with ``g(n) = s/(n+1)`` or ``g(n) = s*q**n``.  For this class
the essential spectrum of every selfadjoint rotation is the set of rotated
cluster values, and spectral counts are available in closed form.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .errors import ConfigError, DomainError, RepresentationError
from .serial import format_complex, format_real, parse_complex, parse_real

DEGENERATE_DIRECTION = 1e-12
TIE_TOL = 1e-12
EIG_RTOL = 1e-10

__all__ = [
    "TailEntryFamily", "OperatorModel", "SelfadjointModel", "rotate_real_part",
    "ess_sup", "count_at_least", "count_above", "positive_part_spectrum",
    "ess_range", "hermitian_eigen", "BlockSlot", "TailSlot", "StreamEntry",
]


@dataclass(frozen=True)
class TailEntryFamily:
    """Diagonal entries clustering at ``value``.

    Parameters
    ----------
    value : complex
        Cluster point.
    mode : {"exact", "approach"}
        ``exact`` repeats ``value`` infinitely often; ``approach`` generates
        ``value + direction * g(n)`` for ``n = 1, 2, ...``.
    direction : complex
        Unit approach direction (ignored in exact mode).
    family : {"harmonic", "geometric"}
    scale : float
        ``s > 0``.
    ratio : float
        ``q`` in ``(0, 1)``, geometric family only.
    """

    value: complex
    mode: str = "exact"
    direction: complex = 1.0
    family: str = "harmonic"
    scale: float = 1.0
    ratio: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.mode not in ("exact", "approach"):
            raise RepresentationError(f"unknown tail mode {self.mode!r}")
        if self.family not in ("harmonic", "geometric"):
            raise RepresentationError(f"unknown tail family {self.family!r}")
        w = complex(self.direction)
        if self.mode == "approach":
            if not np.isfinite(w) or abs(w) == 0:
                raise RepresentationError("approach direction must be a nonzero finite number")
            w = w / abs(w)
            if not self.scale > 0 or not math.isfinite(self.scale):
                raise RepresentationError(f"scale must be positive, got {self.scale}")
        if self.family == "geometric" and not (0 < self.ratio < 1):
            raise RepresentationError(f"ratio must lie in (0, 1), got {self.ratio}")
        if not np.isfinite(self.value):
            raise RepresentationError("cluster value must be finite")
        object.__setattr__(self, "direction", w)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "ratio", float(self.ratio))

    @classmethod
    def exact(cls, value):
        return cls(value, "exact")

    @classmethod
    def harmonic(cls, value, direction, scale=1.0):
        return cls(value, "approach", direction, "harmonic", scale)

    @classmethod
    def geometric(cls, value, direction, scale=1.0, ratio=0.5):
        return cls(value, "approach", direction, "geometric", scale, ratio)

    @property
    def is_exact(self):
        return self.mode == "exact"

    def g(self, n):
        """Offset magnitudes ``g(n)``; ``n`` may be an array."""
        n = np.asarray(n, dtype=float)
        if self.family == "harmonic":
            return self.scale / (n + 1.0)
        return self.scale * self.ratio ** n

    def entry(self, n):
        if self.is_exact:
            return self.value
        return self.value + self.direction * float(self.g(n))

    def entries(self, count):
        n = np.arange(1, count + 1)
        if self.is_exact:
            return np.full(count, self.value, dtype=complex)
        return self.value + self.direction * self.g(n)

    @property
    def max_modulus(self):
        if self.is_exact:
            return abs(self.value)
        return abs(self.value) + float(self.g(1))

    def count_offsets_at_least(self, d):
        """Number of ``n >= 1`` with ``g(n) >= d`` for ``d > 0``."""
        if d <= 0:
            return math.inf
        if self.family == "harmonic":
            n = math.floor(self.scale / d - 1.0)
        else:
            if d > self.scale:
                return 0
            n = math.floor(math.log(d / self.scale) / math.log(self.ratio))
        n = max(n, 0)
        # guard the floor against rounding in either direction
        while n > 0 and float(self.g(n)) < d:
            n -= 1
        while float(self.g(n + 1)) >= d:
            n += 1
        return n

    def count_offsets_above(self, d):
        """Number of ``n >= 1`` with ``g(n) > d`` for ``d >= 0``."""
        if d <= 0:
            return math.inf
        n = self.count_offsets_at_least(d)
        while n > 0 and float(self.g(n)) <= d:
            n -= 1
        return n

    def to_dict(self):
        return {
            "value": format_complex(self.value),
            "mode": self.mode,
            "direction": format_complex(self.direction),
            "family": self.family,
            "scale": format_real(self.scale),
            "ratio": format_real(self.ratio),
        }

    @classmethod
    def from_dict(cls, data, location="tail"):
        if not isinstance(data, dict):
            raise ConfigError(location, "expected an object")
        allowed = {"value", "mode", "direction", "family", "scale", "ratio"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(location, f"unexpected keys {sorted(unknown)}")
        if "value" not in data:
            raise ConfigError(location, "missing 'value'")
        kwargs = {"value": parse_complex(data["value"], f"{location}.value")}
        for key in ("mode", "family"):
            if key in data:
                if not isinstance(data[key], str):
                    raise ConfigError(f"{location}.{key}", "expected a string")
                kwargs[key] = data[key]
        if "direction" in data:
            kwargs["direction"] = parse_complex(data["direction"], f"{location}.direction")
        for key in ("scale", "ratio"):
            if key in data:
                kwargs[key] = float(parse_real(data[key], f"{location}.{key}"))
        try:
            return cls(**kwargs)
        except RepresentationError as exc:
            raise ConfigError(location, str(exc)) from exc


def _as_block(F):
    F = np.array(F, dtype=complex)
    if F.size == 0:
        return np.zeros((0, 0), dtype=complex)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise RepresentationError(f"finite block must be square, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise RepresentationError("finite block has non-finite entries")
    return F


@dataclass(frozen=True, eq=False)
class OperatorModel:
    """Bounded operator ``F (+) diag(tail entries)``.

    Tail entries are enumerated round-robin: global index
    ``dim + (n-1)*len(tail) + f`` (0-based) holds entry ``n`` of family ``f``.
    """

    finite_block: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))
    tail: tuple = ()

    def __post_init__(self):
        F = _as_block(self.finite_block)
        F.setflags(write=False)
        object.__setattr__(self, "finite_block", F)
        object.__setattr__(self, "tail", tuple(self.tail))
        for fam in self.tail:
            if not isinstance(fam, TailEntryFamily):
                raise RepresentationError("tail entries must be TailEntryFamily instances")

    @property
    def dim(self):
        return self.finite_block.shape[0]

    @property
    def cluster_values(self):
        return np.array([f.value for f in self.tail], dtype=complex)

    @cached_property
    def opnorm_bound(self):
        """Computable bound on the operator norm."""
        block = float(np.linalg.norm(self.finite_block, 2)) if self.dim else 0.0
        tail = max((f.max_modulus for f in self.tail), default=0.0)
        return max(block, tail)

    def is_selfadjoint(self, tol=TIE_TOL):
        F = self.finite_block
        scale = max(1.0, float(np.abs(F).max(initial=0.0)))
        if self.dim and np.abs(F - F.conj().T).max() > tol * scale:
            return False
        for f in self.tail:
            if abs(f.value.imag) > tol * max(1.0, abs(f.value)):
                return False
            if not f.is_exact and abs(f.direction.imag) > tol:
                return False
        return True

    def tail_entry(self, family_index, n):
        return self.tail[family_index].entry(n)

    def tail_position(self, family_index, n):
        """Global 0-based coordinate of entry ``n`` of family ``family_index``."""
        return self.dim + (n - 1) * len(self.tail) + family_index

    def diagonal(self, count):
        """First ``count`` tail diagonal entries in the global enumeration."""
        F = len(self.tail)
        if F == 0:
            return np.zeros(0, dtype=complex)
        rows = -(-count // F)
        cols = np.stack([f.entries(rows) for f in self.tail], axis=1)
        return cols.reshape(-1)[:count]

    def dense(self, size):
        """Leading ``size x size`` compression of the model."""
        if size < self.dim:
            raise DomainError("compression must contain the finite block")
        out = np.zeros((size, size), dtype=complex)
        out[: self.dim, : self.dim] = self.finite_block
        idx = np.arange(self.dim, size)
        out[idx, idx] = self.diagonal(size - self.dim)
        return out

    def affine(self, a, b):
        """Model of ``a*I + b*A``."""
        a, b = complex(a), complex(b)
        F = a * np.eye(self.dim) + b * self.finite_block
        tail = []
        for f in self.tail:
            if f.is_exact or b == 0:
                tail.append(TailEntryFamily.exact(a + b * f.value))
            else:
                tail.append(TailEntryFamily(a + b * f.value, "approach", b * f.direction,
                                            f.family, f.scale * abs(b), f.ratio))
        return OperatorModel(F, tuple(tail))

    def with_block(self, F):
        return OperatorModel(F, self.tail)

    def to_dict(self):
        return {
            "finite_block": [[format_complex(z) for z in row] for row in self.finite_block],
            "tail": [f.to_dict() for f in self.tail],
        }

    @classmethod
    def from_dict(cls, data, location="operator"):
        if not isinstance(data, dict):
            raise ConfigError(location, "expected an object")
        unknown = set(data) - {"finite_block", "tail"}
        if unknown:
            raise ConfigError(location, f"unexpected keys {sorted(unknown)}")
        rows = data.get("finite_block", [])
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ConfigError(f"{location}.finite_block", "expected a list of rows")
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ConfigError(f"{location}.finite_block[{i}]",
                                  f"expected {n} entries, got {len(row)}")
        F = np.array([[parse_complex(z, f"{location}.finite_block[{i}][{j}]")
                       for j, z in enumerate(row)] for i, row in enumerate(rows)],
                     dtype=complex).reshape(n, n)
        tail = data.get("tail", [])
        if not isinstance(tail, list):
            raise ConfigError(f"{location}.tail", "expected a list")
        fams = tuple(TailEntryFamily.from_dict(t, f"{location}.tail[{i}]")
                     for i, t in enumerate(tail))
        return cls(F, fams)


def hermitian_eigen(M):
    """Eigen-decomposition of a Hermitian matrix with a residual check.

    Returns
    -------
    values : ndarray
        Eigenvalues in nonincreasing order.
    vectors : ndarray
        Orthonormal eigenvectors as columns, matching ``values``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("expected a square matrix")
    n = M.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    norm = float(np.abs(M).max())
    if np.abs(M - M.conj().T).max() > 1e-12 * max(1.0, norm):
        raise DomainError("matrix is not Hermitian")
    M = (M + M.conj().T) / 2
    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    resid = np.linalg.norm(M - (V * w) @ V.conj().T, 2)
    orth = np.linalg.norm(V.conj().T @ V - np.eye(n), 2)
    if resid > EIG_RTOL * scale or orth > EIG_RTOL:  # pragma: no cover - LAPACK failure
        raise DomainError(f"eigensolver residual {resid:.3e} exceeds contract")
    return w, V


class SelfadjointModel:
    """Real-diagonal-tail model of a selfadjoint operator such as ``Re(exp(-i t) A)``.

    ``source`` (optional) is the complex model the rotation came from; it is
    used only to map eigenvectors back to points of the complex plane.
    """

    def __init__(self, finite_block, tail, source=None, theta=0.0):
        F = _as_block(finite_block)
        if F.size and np.abs(F - F.conj().T).max() > 1e-12 * max(1.0, float(np.abs(F).max())):
            raise DomainError("finite block of a selfadjoint model must be Hermitian")
        self.finite_block = (F + F.conj().T) / 2
        self.tail = tuple(tail)
        for f in self.tail:
            if abs(f.value.imag) > 0 or (not f.is_exact and abs(f.direction.imag) > 0):
                raise DomainError("selfadjoint tail families must be real")
        self.source = source
        self.theta = float(theta)
        scale = max(1.0, float(np.abs(self.finite_block).max(initial=0.0)))
        self.eig_tol = EIG_RTOL * scale

    @classmethod
    def from_operator(cls, A):
        if not A.is_selfadjoint():
            raise DomainError("operator model is not selfadjoint")
        tail = []
        for f in A.tail:
            if f.is_exact:
                tail.append(TailEntryFamily.exact(f.value.real))
            else:
                tail.append(TailEntryFamily(f.value.real, "approach", float(np.sign(f.direction.real)),
                                            f.family, f.scale, f.ratio))
        return cls(A.finite_block, tail, source=A, theta=0.0)

    @property
    def dim(self):
        return self.finite_block.shape[0]

    @property
    def values(self):
        return [f.value.real for f in self.tail]

    @cached_property
    def eigen(self):
        return hermitian_eigen(self.finite_block)

    def tie(self, t):
        return TIE_TOL * max(1.0, abs(t))

    def __repr__(self):
        return f"SelfadjointModel(dim={self.dim}, clusters={self.values})"


def rotate_real_part(A, theta):
    """Selfadjoint model of ``Re(exp(-1j*theta) * A)``."""
    rot = np.exp(-1j * theta)
    G = rot * A.finite_block
    block = (G + G.conj().T) / 2
    tail = []
    for f in A.tail:
        v = (rot * f.value).real
        if f.is_exact:
            tail.append(TailEntryFamily.exact(v))
            continue
        rho = (rot * f.direction).real
        if abs(rho) <= DEGENERATE_DIRECTION:
            tail.append(TailEntryFamily.exact(v))
        else:
            tail.append(TailEntryFamily(v, "approach", math.copysign(1.0, rho), f.family,
                                        f.scale * abs(rho), f.ratio))
    return SelfadjointModel(block, tail, source=A, theta=theta)


def _require_tail(model):
    if not model.tail:
        raise DomainError("finite-dimensional model has no essential spectrum")


def ess_sup(H):
    _require_tail(H)
    return max(H.values)


def count_at_least(H, t):
    """Number of eigenvalues ``>= t`` with multiplicity (``math.inf`` if infinite)."""
    t = float(t)
    tie = H.tie(t)
    w, _ = H.eigen
    total = int(np.count_nonzero(w >= t - H.eig_tol))
    for f in H.tail:
        v = f.value.real
        if f.is_exact:
            if v >= t - tie:
                return math.inf
        elif f.direction.real > 0:
            if v >= t - tie:
                return math.inf
            total += f.count_offsets_at_least(t - v - tie)
        else:
            if v > t + tie:
                return math.inf
    return total


def count_above(H, t):
    """Number of eigenvalues ``> t`` with multiplicity."""
    t = float(t)
    tie = H.tie(t)
    w, _ = H.eigen
    total = int(np.count_nonzero(w > t + H.eig_tol))
    for f in H.tail:
        v = f.value.real
        if f.is_exact:
            if v > t + tie:
                return math.inf
        elif f.direction.real > 0:
            if v >= t - tie:
                return math.inf
            total += f.count_offsets_above(t - v + tie)
        else:
            if v > t + tie:
                return math.inf
    return total


def has_spectrum_below(H, t):
    """Whether some eigenvalue (block or tail entry) lies strictly below ``t``."""
    t = float(t)
    tie = H.tie(t)
    w, _ = H.eigen
    if np.any(w < t - H.eig_tol):
        return True
    for f in H.tail:
        v = f.value.real
        if v < t - tie:
            return True
        if not f.is_exact and f.direction.real < 0:
            return True
    return False


@dataclass(frozen=True)
class BlockSlot:
    """Eigenvector ``index`` of the finite block of a rotation at angle ``theta``."""

    index: int
    theta: float = 0.0


@dataclass(frozen=True)
class TailSlot:
    """Entry ``position`` (1-based) of tail family ``family``."""

    family: int
    position: int


class StreamEntry(NamedTuple):
    value: float        # eigenvalue of (H - m)_+
    kind: str           # "eig" or "tail"
    slot: object        # BlockSlot or TailSlot


def positive_part_stream(H, m) -> Iterator[StreamEntry]:
    """Eigenvalues of ``(H - m)_+`` carried by actual basis vectors, nonincreasing.

    Positive values come first (block eigenvalues above ``m`` merged with
    tail entries above ``m``), followed by zero values from basis vectors
    whose eigenvalue equals ``m``.  The stream is infinite when infinitely
    many such vectors exist.
    """
    m = float(m)
    tie = H.tie(m)
    w, _ = H.eigen
    heap = []
    for i, lam in enumerate(w):
        if lam > m + H.eig_tol:
            heap.append((-(lam - m), 0, i, "eig", BlockSlot(i, H.theta)))
    fams = []
    for k, f in enumerate(H.tail):
        v = f.value.real
        if not f.is_exact and f.direction.real > 0:
            d = m - v
            if d < -tie:
                raise DomainError("m lies below the essential supremum")
            limit = f.count_offsets_above(d) if d > tie else math.inf
            if limit:
                shift = d if d > tie else 0.0
                fams.append((k, f, shift, limit))
                heap.append((-(float(f.g(1)) - shift), 1 + k, 1, "tail", TailSlot(k, 1)))
    heapq.heapify(heap)
    fam_info = {k: (f, shift, limit) for k, f, shift, limit in fams}
    while heap:
        negval, order, pos, kind, slot = heapq.heappop(heap)
        yield StreamEntry(-negval, kind, slot)
        if kind == "tail":
            f, shift, limit = fam_info[slot.family]
            nxt = pos + 1
            if nxt <= limit:
                val = float(f.g(nxt)) - shift
                heapq.heappush(heap, (-val, order, nxt, "tail", TailSlot(slot.family, nxt)))
    for i, lam in enumerate(w):
        if abs(lam - m) <= H.eig_tol:
            yield StreamEntry(0.0, "eig", BlockSlot(i, H.theta))
    for k, f in enumerate(H.tail):
        if f.is_exact and abs(f.value.real - m) <= tie:
            n = 1
            while True:
                yield StreamEntry(0.0, "tail", TailSlot(k, n))
                n += 1


def positive_part_spectrum(H, m, N):
    """Top ``N`` eigenvalues of ``(H - m)_+`` and a bound on the next one.

    Returns
    -------
    values : ndarray
        Nonincreasing, padded with zeros.
    tail_bound : float
        Upper bound for the ``(N+1)``-th eigenvalue.
    """
    _require_tail(H)
    if m < ess_sup(H) - H.tie(m):
        raise DomainError("(H - m)_+ is compact only for m >= ess sup")
    N = int(N)
    if N < 0:
        raise DomainError("N must be nonnegative")
    out = np.zeros(N)
    stream = positive_part_stream(H, m)
    i = 0
    nxt = 0.0
    for entry in stream:
        if i < N:
            out[i] = entry.value
            i += 1
        else:
            nxt = entry.value
            break
        if entry.value == 0.0:
            break
    return out, float(nxt)


def diagonal_value(A, slot):
    """Point ``<A x, x>`` of the complex model for the basis vector ``x`` of ``slot``."""
    if isinstance(slot, TailSlot):
        return complex(A.tail[slot.family].entry(slot.position))
    H = rotate_real_part(A, slot.theta)
    _, V = H.eigen
    x = V[:, slot.index]
    return complex(x.conj() @ A.finite_block @ x)


def ess_range(A):
    """Vertices (counterclockwise) of the convex hull of the cluster values."""
    from .geometry import convex_hull

    _require_tail(A)
    return convex_hull(A.cluster_values)
