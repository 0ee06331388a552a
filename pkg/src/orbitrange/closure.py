"""Closure of the range as a hull of truncated ranges, witnesses and closedness.

The closure of the range for positive ``c`` is the convex hull of the sets

    S_m = range(A, C_m) + tail_sum(c, m) * W_ess(A),   0 <= m <= rank(c),

where ``C_m`` keeps the ``m`` largest eigenvalues.  The range itself is
closed exactly when ``S_0 <= S_1 <= ...`` is an increasing chain.  Support
functions decide the closures of the ``S_m``; whether ``S_m`` reaches its
supporting line is decided by exact spectral counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import DomainError, NotAMemberError
from .geometry import convex_hull, convex_weights, halfplane_polygon, polygon_support, signed_margin
from .opmodel import BlockSlot, TailSlot, count_above, diagonal_value, ess_range, rotate_real_part
from .ranges import (
    DEFAULT_GRID, DEFAULT_TOL, ConvexRegion2D, SupportEngine, SupportValue, grid, region,
)
from .seq import SpectrumSeq, as_positive, is_submajorized, truncate

__all__ = [
    "m_cut", "ClosureRegion", "closure_rhs", "verify_main_theorem", "VerifyReport",
    "submajorized_point_set", "DecompositionWitness", "WitnessTerm", "decompose_point",
    "rank_condition_certificate", "ChainLink", "ChainReport", "chain_check",
]


def m_cut(A, c, tol):
    """Smallest ``M`` with ``2 * ||A|| * tail_sum(c, M) <= tol`` (``rank(c)`` if finite)."""
    c = as_positive(c, "c")
    if c.rank != math.inf:
        return int(c.rank)
    bound = 2.0 * max(A.opnorm_bound, 1e-300)
    M = 0
    while bound * float(c.tail_sum(M)) > tol:
        M += 1
    return M


@dataclass
class ClosureRegion(ConvexRegion2D):
    """Region of the hull of the ``S_m`` plus the per-term support table.

    ``term_support[m, j]`` is the support value of ``S_m`` at direction ``j``
    and ``term_attained[m, j]`` tells whether ``S_m`` reaches that value.
    """

    m_cut: int = 0
    cut_error: float = 0.0
    term_support: Optional[np.ndarray] = None
    term_attained: Optional[np.ndarray] = None


class _Terms:
    """Per-(m, theta) data for the sets ``S_m``."""

    def __init__(self, A, c, engine, tol, M):
        self.A, self.c, self.engine, self.tol, self.M = A, c, engine, tol, M
        self.ess = ess_range(A)
        self.tails = [float(c.tail_sum(m)) for m in range(M + 1)]
        self.truncs = [truncate(c, m) for m in range(M + 1)]
        self._cache = {}

    def at(self, m, theta):
        key = (m, float(theta))
        sv = self._cache.get(key)
        if sv is None:
            sv = self._cache[key] = self.engine.support(self.truncs[m], theta, self.tol)
        return sv

    def h(self, m, theta):
        sv = self.at(m, theta)
        return sv.value + self.tails[m] * float(polygon_support(self.ess, theta)), sv

    def candidates(self, m, thetas):
        """Points of ``S_m`` (as witness terms) from boundary data at ``thetas``.

        Each candidate is ``(m_eff, boundary_point, ess_point)`` with
        ``boundary_point`` a pairing point of ``C_{m_eff}``.
        """
        out = []
        for t in thetas:
            sv = self.at(m, t)
            n = sv.terms
            total = self.tails[n] if n <= self.M else float(self.c.tail_sum(n))
            inner = total - self.tails[m]
            for v in self.ess:
                nu = v if total == 0 else (inner * sv.cluster_point + self.tails[m] * v) / total
                out.append((n, sv.pairing_point, complex(nu), total))
        return out


def _rhs(A, c, tol, grid_size, engine, m_cut_override=None):
    c = as_positive(c, "c")
    engine = engine or SupportEngine(A)
    M = m_cut(A, c, tol) if m_cut_override is None else int(m_cut_override)
    if c.rank != math.inf:
        M = min(M, int(c.rank))
    terms = _Terms(A, c, engine, tol, M)
    cut_error = 2.0 * A.opnorm_bound * float(c.tail_sum(M)) if c.rank == math.inf else 0.0
    thetas = grid(grid_size)
    table = np.empty((M + 1, thetas.size))
    att = np.empty((M + 1, thetas.size), dtype=bool)
    errs = np.zeros(thetas.size)
    for j, t in enumerate(thetas):
        for m in range(M + 1):
            table[m, j], sv = terms.h(m, t)
            att[m, j] = sv.attained
            errs[j] = max(errs[j], sv.truncation_error)
    return terms, thetas, table, att, errs + cut_error, cut_error


def closure_rhs(A, c, tol=DEFAULT_TOL, grid_size=DEFAULT_GRID, engine=None, m_cut_override=None):
    """Region of ``conv(union_m S_m)`` from per-term support functions."""
    c = as_positive(c, "c")
    if c.rank == 0:
        thetas = grid(grid_size)
        sups = [SupportValue(float(t), 0.0, 0.0, True, "yes") for t in thetas]
        zero = np.zeros(1, dtype=complex)
        return ClosureRegion(thetas, sups, zero, zero, np.ones(thetas.size, bool),
                             ess_range(A), m_cut=0, term_support=np.zeros((1, thetas.size)),
                             term_attained=np.ones((1, thetas.size), bool))
    terms, thetas, table, att, errs, cut_error = _rhs(A, c, tol, grid_size, engine, m_cut_override)
    h = table.max(axis=0)
    sups = []
    points = []
    for j, t in enumerate(thetas):
        best = int(np.argmax(table[:, j]))
        sv = terms.at(best, t)
        p = sv.point + terms.tails[best] * terms.ess[np.argmax(
            (np.exp(-1j * t) * terms.ess).real)]
        points.append(p)
        sups.append(SupportValue(float(t), float(h[j]), float(errs[j]),
                                 bool(att[:, j][table[:, j] >= h[j]].any()), "unknown", complex(p)))
    outer = halfplane_polygon(thetas, h + errs)
    inner = convex_hull(np.array(points))
    return ClosureRegion(thetas, sups, outer, inner, np.array([s.attained for s in sups]),
                         terms.ess, m_cut=terms.M, cut_error=cut_error,
                         term_support=table, term_attained=att)


class VerifyReport(NamedTuple):
    hausdorff: float
    bound: float
    passed: bool
    certified_error: float
    grid_slack: float

    def to_dict(self):
        return {"hausdorff": self.hausdorff, "bound": self.bound, "pass": self.passed,
                "certified_error": self.certified_error, "grid_slack": self.grid_slack}


def verify_main_theorem(A, c, tol=DEFAULT_TOL, grid_size=DEFAULT_GRID):
    """Compare the outer polygon of the range with the hull of the ``S_m``."""
    c = as_positive(c, "c")
    if c.rank == 0:
        return VerifyReport(0.0, 0.0, True, 0.0, 0.0)
    engine = SupportEngine(A)
    R = region(A, c, grid_size, tol, engine=engine)
    Q = closure_rhs(A, c, tol, grid_size, engine=engine)
    from .geometry import hausdorff

    hd = hausdorff(R.outer_polygon, Q.outer_polygon)
    cert = R.max_error + Q.max_error
    slack = max(R.diameter, Q.diameter) * (1 - math.cos(math.pi / grid_size))
    bound = cert + slack
    return VerifyReport(hd, bound, bool(hd <= bound), cert, slack)


class PointSet(NamedTuple):
    point: complex
    offset_region: np.ndarray
    contained: bool
    margin: float


def submajorized_point_set(A, c, x, placement, tol=DEFAULT_TOL, grid_size=DEFAULT_GRID,
                           outer=None):
    """``tr(XA) + (tr c - tr x) W_ess(A)`` for a diagonal ``X`` placed on basis vectors.

    ``placement[i]`` is the slot (block eigenvector of one fixed rotation, or
    a tail position) carrying the ``i``-th entry of ``x``.
    """
    c = as_positive(c, "c")
    x = as_positive(x, "x")
    if x.tail is not None:
        raise DomainError("x must have a finite head")
    verdict = is_submajorized(x, c)
    if verdict.verdict is not True:
        raise DomainError(f"x is not submajorized by c (violation at n={verdict.index})")
    k = x.support_length()
    placement = list(placement)
    if len(placement) < k:
        raise DomainError(f"placement has {len(placement)} slots for {k} nonzero entries")
    used = placement[:k]
    if len(set(used)) != len(used):
        raise DomainError("placement slots must be distinct")
    thetas = {s.theta for s in used if isinstance(s, BlockSlot)}
    if len(thetas) > 1:
        raise DomainError("block slots must come from a single rotation")
    for s in used:
        if isinstance(s, BlockSlot) and not 0 <= s.index < A.dim:
            raise DomainError(f"block slot {s.index} out of range")
        if isinstance(s, TailSlot) and not (0 <= s.family < len(A.tail) and s.position >= 1):
            raise DomainError(f"invalid tail slot {s}")
    point = sum((float(x.entry(i + 1)) * diagonal_value(A, s) for i, s in enumerate(used)), 0j)
    gap = float(c.trace) - float(x.trace)
    offset = point + gap * ess_range(A)
    if outer is None:
        outer = region(A, c, grid_size, tol).outer_polygon
    margin = float(signed_margin(outer, offset).min())
    return PointSet(complex(point), offset, margin >= -tol, margin)


@dataclass(frozen=True)
class WitnessTerm:
    m: int
    boundary_point: complex
    ess_point: complex
    weight: float
    tail: float

    def to_dict(self):
        return {"m": self.m, "boundary_point": [self.boundary_point.real, self.boundary_point.imag],
                "ess_point": [self.ess_point.real, self.ess_point.imag], "weight": self.weight,
                "tail_sum": self.tail}


@dataclass(frozen=True)
class DecompositionWitness:
    """``z = sum_i w_i * (p_i + tail_sum(c, m_i) * nu_i)`` up to ``residual``."""

    terms: tuple
    residual: float
    target: complex = 0j

    def reconstruct(self):
        return sum((t.weight * (t.boundary_point + t.tail * t.ess_point) for t in self.terms), 0j)

    def to_dict(self):
        return {"terms": [t.to_dict() for t in self.terms], "residual": self.residual,
                "target": [self.target.real, self.target.imag]}


def _witness(cands, idx, w, z):
    merged = {}
    for i, wi in zip(idx, w):
        if wi <= 0:
            continue
        n, bp, nu, tail = cands[i]
        acc = merged.setdefault(n, [0.0, 0j, 0j, tail])
        acc[0] += wi
        acc[1] += wi * bp
        acc[2] += wi * nu
    terms = []
    for n in sorted(merged):
        wt, bp, nu, tail = merged[n]
        terms.append(WitnessTerm(n, complex(bp / wt), complex(nu / wt), float(wt), float(tail)))
    total = sum(t.weight for t in terms)
    terms = tuple(WitnessTerm(t.m, t.boundary_point, t.ess_point, t.weight / total, t.tail)
                  for t in terms)
    wit = DecompositionWitness(terms, 0.0, complex(z))
    return DecompositionWitness(terms, float(abs(wit.reconstruct() - z)), complex(z))


def decompose_point(A, c, z, tol=1e-9, grid_size=DEFAULT_GRID, refine=40):
    """Witness that ``z`` lies in the hull of the ``S_m`` (at most three terms).

    The lowest ``m`` whose ``S_m`` alone contains ``z`` is tried first;
    otherwise a Carathéodory combination over all terms is built, preferring
    lower ``m``.  Directions are added near ``z`` until the residual is at
    most ``tol``.
    """
    c = as_positive(c, "c")
    z = complex(z)
    engine = SupportEngine(A)
    if c.rank == 0:
        if abs(z) > tol:
            raise NotAMemberError("range of the zero spectrum is {0}", float(np.angle(z)), abs(z))
        return DecompositionWitness((WitnessTerm(0, 0j, complex(ess_range(A)[0]), 1.0, 0.0),),
                                    0.0, z)
    terms, thetas, table, att, errs, _ = _rhs(A, c, tol, grid_size, engine)
    h = table.max(axis=0) + errs
    gaps = (np.exp(-1j * thetas) * z).real - h
    j = int(np.argmax(gaps))
    if gaps[j] > tol:
        raise NotAMemberError(f"point {z} lies outside the closure (margin {gaps[j]:.3e})",
                              float(thetas[j]), float(gaps[j]))
    dirs = list(thetas)
    best = None
    for _ in range(refine + 1):
        per_m = [terms.candidates(m, dirs) for m in range(terms.M + 1)]
        for m in range(terms.M + 1):
            cands = per_m[m]
            pts = np.array([bp + tail * nu for _, bp, nu, tail in cands])
            idx, w, r = convex_weights(pts, z)
            if r <= tol:
                return _witness(cands, idx, w, z)
        cands = [cd for group in per_m for cd in group]
        pts = np.array([bp + tail * nu for _, bp, nu, tail in cands])
        idx, w, r = convex_weights(pts, z)
        wit = _witness(cands, idx, w, z)
        if best is None or wit.residual < best.residual:
            best = wit
        if wit.residual <= tol:
            return wit
        near = wit.reconstruct()
        phi = float(np.angle(z - near)) if abs(z - near) > 0 else 0.0
        step = 2 * np.pi / grid_size
        dirs = dirs + [phi, phi + step / 4, phi - step / 4]
    return best


def rank_condition_certificate(A, c, theta):
    """Whether ``Re(exp(-1j*theta) A)`` has at least ``rank(c)`` eigenvalues above its ess sup."""
    c = as_positive(c, "c")
    H = rotate_real_part(A, theta)
    from .opmodel import ess_sup

    return bool(count_above(H, ess_sup(H)) >= c.rank)


@dataclass
class ChainLink:
    m: int
    status: str               # "ok", "fails" or "undecided"
    support_gap: float = 0.0  # max over directions of h_m - h_{m+1}
    theta: Optional[float] = None
    margin: Optional[float] = None
    reason: str = ""

    def to_dict(self):
        return {"m": self.m, "status": self.status, "support_gap": self.support_gap,
                "theta": self.theta, "margin": self.margin, "reason": self.reason}


@dataclass
class ChainReport:
    verdict: str
    links: List[ChainLink] = field(default_factory=list)
    failures: List[tuple] = field(default_factory=list)
    undecided_thetas: List[float] = field(default_factory=list)
    certificate: str = ""

    def to_dict(self):
        return {"verdict": self.verdict, "links": [l.to_dict() for l in self.links],
                "failures": [list(f) for f in self.failures],
                "undecided_thetas": self.undecided_thetas, "certificate": self.certificate}


def _critical_directions(A):
    """Outward normals of the ess-range edges (directions with tied clusters)."""
    E = ess_range(A)
    if E.size < 2:
        return []
    if E.size == 2:
        d = E[1] - E[0]
        return [float(np.angle(-1j * d)), float(np.angle(1j * d))]
    d = np.roll(E, -1) - E
    return [float(a) for a in np.angle(-1j * d)]


def chain_check(A, c, tol=DEFAULT_TOL, grid_size=DEFAULT_GRID):
    """Decide whether the range is closed via the chain ``S_0 <= S_1 <= ...``.

    In a direction where ``Re(exp(-1j*theta) A)`` has only ``q < rank(c)``
    eigenvalues at or above its ess sup, ``S_q`` reaches its supporting line
    but ``S_{q+1}`` has the same support value without reaching it, so link
    ``q`` fails there.
    """
    c = as_positive(c, "c")
    r = c.rank
    if r == 0:
        return ChainReport("closed", [], [], [], "zero spectrum")
    engine = SupportEngine(A)
    selfadjoint = A.is_selfadjoint()
    M = m_cut(A, c, tol)
    thetas = [float(t) for t in grid(grid_size)]
    extra = [0.0, math.pi] if selfadjoint else _critical_directions(A)
    for t in extra:
        t = float(np.mod(t, 2 * np.pi))
        if not any(abs(t - s) < 1e-15 for s in thetas):
            thetas.append(t)
    failures = []
    undecided = []
    for t in thetas:
        d = engine.direction(t)
        q = d.count
        if q < r:
            margin = 0.0
            failures.append((int(q), t, margin))
        elif not selfadjoint and not rank_condition_certificate(A, c, t):
            undecided.append(t)
    # support comparison of consecutive chain members
    terms = _Terms(A, c, engine, tol, min(M, int(r) if r != math.inf else M) + 1)
    links = []
    top = terms.M
    fail_by_m = {}
    for q, t, margin in failures:
        fail_by_m.setdefault(q, (t, margin))
    sample = thetas[:: max(1, len(thetas) // 90)]
    for m in range(top):
        if r != math.inf and m >= r:
            break
        gap = max(terms.h(m, t)[0] - terms.h(m + 1, t)[0]
                  - terms.at(m, t).truncation_error - terms.at(m + 1, t).truncation_error
                  for t in sample)
        if m in fail_by_m:
            t, margin = fail_by_m[m]
            links.append(ChainLink(m, "fails", float(gap), t, margin,
                                   f"S_{m} attains its support value at theta={t:.6g}, S_{m + 1} does not"))
        elif gap > tol:
            links.append(ChainLink(m, "fails", float(gap), None, float(gap), "support comparison"))
            failures.append((m, None, float(gap)))
        elif undecided:
            links.append(ChainLink(m, "undecided", float(gap)))
        else:
            links.append(ChainLink(m, "ok", float(gap)))
    if failures:
        q, t, margin = failures[0]
        cert = f"link m={q} fails at theta={t}: rank(c)={r} exceeds count {q}"
        return ChainReport("not_closed", links, failures, undecided, cert)
    if selfadjoint:
        return ChainReport("closed", links, [], [], "both interval endpoints attained")
    if undecided:
        return ChainReport("unknown", links, [], undecided,
                           "rank condition fails in some attained directions")
    return ChainReport("closed", links, [], [], "rank condition holds in every grid direction")
