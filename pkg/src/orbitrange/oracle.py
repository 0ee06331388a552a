"""Finite-dimensional ground truth and simulators.

Everything here works with explicit small matrices: Haar-sampled unitary
orbits, sorted-pairing maximizers, random majorized spectra, a heuristic
search realizing a prescribed value, and closed-form simulations of orbit
sequences whose mass escapes into the diagonal tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment, linprog

from .errors import DomainError
from .geometry import distance_to_polygon
from .opmodel import BlockSlot, OperatorModel, TailEntryFamily, TailSlot, ess_range, rotate_real_part
from .seq import SpectrumSeq, greedy_interpolant, is_majorized, is_submajorized

MAX_SAMPLING_DIM = 12

__all__ = [
    "FiniteInstance", "sorted_pairing", "haar_unitaries", "haar_orbit_cloud", "boundary_maximizer",
    "random_majorized", "random_majorized_batch", "realize_value", "random_instance",
    "PlanEntry", "OrbitSequencePlan", "dichotomy_sim", "DichotomyReport",
    "tail_compression_check", "CompressionReport", "hiai_nakamura_decomposition",
    "truncation_hull_sample", "is_extreme_submajorized",
]


@dataclass(frozen=True, eq=False)
class FiniteInstance:
    """``n x n`` matrix ``A_fin`` and the diagonal ``c_fin`` of ``C`` (nonincreasing)."""

    A_fin: np.ndarray
    c_fin: np.ndarray

    def __post_init__(self):
        A = np.array(self.A_fin, dtype=complex)
        c = np.array(self.c_fin, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or c.shape != (A.shape[0],):
            raise DomainError("A_fin must be n x n and c_fin of length n")
        if np.any(np.diff(c) > 0):
            raise DomainError("c_fin must be nonincreasing")
        object.__setattr__(self, "A_fin", A)
        object.__setattr__(self, "c_fin", c)

    @property
    def dim(self):
        return self.A_fin.shape[0]

    def spectrum(self):
        """Positive part of ``c_fin`` as a :class:`SpectrumSeq`."""
        return SpectrumSeq(tuple(float(v) for v in self.c_fin if v > 0))

    def embedded_model(self):
        """``A_fin (+) 0 (+) 0 ...`` as an operator model with the cluster ``{0}``."""
        return OperatorModel(self.A_fin, (TailEntryFamily.exact(0.0),))


def random_instance(rng, max_dim=6):
    """Random block ``B (+) 0_r`` with ``c`` of rank ``r``, total size at most ``max_dim``.

    The zero padding makes the finite sorted pairing agree with the
    embedded infinite model, where mass can always be parked on the
    zero tail.
    """
    k = int(rng.integers(1, max_dim))
    r = int(rng.integers(1, max_dim - k + 1))
    B = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    A = np.zeros((k + r, k + r), dtype=complex)
    A[:k, :k] = B
    c = np.zeros(k + r)
    c[:r] = np.sort(rng.uniform(0.1, 1.0, r))[::-1]
    return FiniteInstance(A, c)


def haar_unitaries(n, count, rng):
    """``count`` Haar-distributed ``n x n`` unitaries (QR with phase correction)."""
    # one draw with interleaved (re, im) pairs: successive calls consume the stream
    # contiguously, so batching does not change the samples
    G = rng.standard_normal((count, n, n, 2))
    Z = (G[..., 0] + 1j * G[..., 1]) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=1, axis2=2)
    return Q * (d / np.abs(d))[:, None, :]


def haar_orbit_cloud(inst, samples, seed=0, batch=20000):
    """Points ``tr(U diag(c) U* A)`` for Haar ``U``; deterministic in ``seed``."""
    if samples < 1:
        raise DomainError("samples must be positive")
    if inst.dim > MAX_SAMPLING_DIM:
        raise DomainError(f"orbit sampling is limited to n <= {MAX_SAMPLING_DIM}")
    rng = np.random.default_rng(seed)
    out = np.empty(samples, dtype=complex)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        U = haar_unitaries(inst.dim, b, rng)
        AU = inst.A_fin @ U
        diag = np.einsum("bji,bji->bi", U.conj(), AU)
        out[done:done + b] = diag @ inst.c_fin
        done += b
    return out


def _hermitian_part(A, theta):
    G = np.exp(-1j * theta) * A
    return (G + G.conj().T) / 2


def sorted_pairing(c_values, eigenvalues):
    """``sum_i c_i mu_i`` with both sequences sorted nonincreasingly."""
    c = np.sort(np.asarray(c_values, float))[::-1]
    mu = np.sort(np.asarray(eigenvalues, float))[::-1]
    if c.size != mu.size:
        raise DomainError("sorted pairing needs sequences of equal length")
    return float(np.dot(c, mu))


@dataclass(frozen=True)
class Maximizer:
    X: np.ndarray
    value: float
    point: complex
    U: np.ndarray


def boundary_maximizer(inst, theta):
    """Sorted pairing of ``c_fin`` with the eigenvalues of ``Re(exp(-1j theta) A_fin)``."""
    H = _hermitian_part(inst.A_fin, theta)
    mu, V = np.linalg.eigh(H)
    order = np.argsort(-mu, kind="stable")
    mu, V = mu[order], V[:, order]
    X = (V * inst.c_fin) @ V.conj().T
    value = float(np.dot(inst.c_fin, mu))
    point = complex(np.trace(X @ inst.A_fin))
    return Maximizer(X, value, point, V)


def random_majorized(c_fin, steps, seed=0):
    """Apply ``steps`` random T-transforms to ``c_fin`` (sum-preserving averagings)."""
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = np.array(c_fin, dtype=float)
    n = x.size
    if n < 2:
        return x
    for _ in range(steps):
        i, j = rng.choice(n, 2, replace=False)
        t = rng.uniform()
        xi, xj = x[i], x[j]
        x[i], x[j] = t * xi + (1 - t) * xj, (1 - t) * xi + t * xj
    return x


def random_majorized_batch(c_fin, steps, count, rng):
    """Vectorized :func:`random_majorized` returning a ``(count, n)`` array."""
    c = np.asarray(c_fin, dtype=float)
    n = c.size
    X = np.tile(c, (count, 1))
    if n < 2:
        return X
    rows = np.arange(count)
    for _ in range(steps):
        i = rng.integers(0, n, count)
        j = (i + rng.integers(1, n, count)) % n
        t = rng.uniform(size=count)
        xi, xj = X[rows, i], X[rows, j]
        X[rows, i] = t * xi + (1 - t) * xj
        X[rows, j] = (1 - t) * xi + t * xj
    return X


def _value(U, c, A):
    B = U.conj().T @ A @ U
    return complex(np.dot(c, np.diagonal(B))), B


def realize_value(inst, z, restarts=8, seed=0, iters=200, tol=1e-13):
    """Search a unitary ``U`` with ``tr(U diag(c) U* A)`` close to ``z``.

    Gauss-Newton steps along skew-Hermitian directions with backtracking.
    Restart 0 starts from the sorted-pairing maximizer whose point is
    nearest to ``z``; other restarts are Haar random.

    Returns
    -------
    U : ndarray
    residual : float
        ``|tr(U diag(c) U* A) - z|``; the only contract of this heuristic.
    """
    z = complex(z)
    rng = np.random.default_rng(seed)
    c, A, n = inst.c_fin, inst.A_fin, inst.dim
    D = np.diag(c).astype(complex)
    starts = []
    thetas = 2 * np.pi * np.arange(16) / 16
    best_start = min((boundary_maximizer(inst, t) for t in thetas), key=lambda m: abs(m.point - z))
    starts.append(best_start.U)
    if restarts > 1:
        starts.extend(haar_unitaries(n, restarts - 1, rng))
    best_U, best_r = None, math.inf
    for U in starts:
        U = np.array(U, dtype=complex)
        f, B = _value(U, c, A)
        r = abs(f - z)
        for _ in range(iters):
            if r <= tol:
                break
            M = D @ B - B @ D
            G1 = (M.conj().T - M) / 2
            G2 = 1j * (M.conj().T + M) / 2
            gram = np.array([[np.vdot(G1, G1).real, np.vdot(G1, G2).real],
                             [np.vdot(G2, G1).real, np.vdot(G2, G2).real]])
            g = f - z
            try:
                a, b = np.linalg.lstsq(gram, [-g.real, -g.imag], rcond=None)[0]
            except np.linalg.LinAlgError:  # pragma: no cover
                break
            K = a * G1 + b * G2
            step = 1.0
            improved = False
            for _ in range(30):
                U_new = U @ expm(step * K)
                f_new, B_new = _value(U_new, c, A)
                if abs(f_new - z) < r:
                    U, f, B, r = U_new, f_new, B_new, abs(f_new - z)
                    improved = True
                    break
                step /= 2
            if not improved:
                break
        if r < best_r:
            best_U, best_r = U, r
        if best_r <= tol:
            break
    return best_U, float(best_r)


# -- orbit sequences ---------------------------------------------------------

@dataclass(frozen=True)
class PlanEntry:
    """Placement of one eigenvalue of ``c`` along the sequence ``X_k``.

    kind ``"pinned"``: fixed on ``slot``.
    kind ``"escaping"``: on tail position ``offset + k`` of family ``family``.
    kind ``"tilted"``: on ``cos(tilt/k) e_slot + sin(tilt/k) e_other``.
    """

    kind: str
    slot: object = None
    family: int = 0
    offset: int = 0
    other: object = None
    tilt: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pinned", "escaping", "tilted"):
            raise DomainError(f"unknown plan entry kind {self.kind!r}")
        if self.kind == "tilted" and (self.other is None or self.other == self.slot):
            raise DomainError("tilted entries need a second, distinct slot")


@dataclass(frozen=True)
class OrbitSequencePlan:
    c: SpectrumSeq
    entries: tuple
    model: OperatorModel

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        k = len(self.c.head) if self.c.tail is None else None
        if k is None:
            raise DomainError("plans need a finite spectrum")
        if len(self.entries) != self.c.support_length():
            raise DomainError("one plan entry per nonzero eigenvalue is required")
        seen = set()
        for e in self.entries:
            if e.kind == "escaping":
                if not 0 <= e.family < len(self.model.tail):
                    raise DomainError(f"escaping entry refers to missing family {e.family}")
                if (e.family, e.offset) in seen:
                    raise DomainError("escaping entries in one family need distinct offsets")
                seen.add((e.family, e.offset))

    @property
    def escaping(self):
        return any(e.kind == "escaping" for e in self.entries)

    @property
    def moving(self):
        return any(e.kind != "pinned" for e in self.entries)


def _slot_vector(A, slot):
    """Sparse vector ``{coordinate: amplitude}`` of a slot in the global basis."""
    if isinstance(slot, TailSlot):
        return {A.tail_position(slot.family, slot.position): 1.0 + 0j}
    if isinstance(slot, BlockSlot):
        H = rotate_real_part(A, slot.theta)
        v = H.eigen[1][:, slot.index]
        return {i: complex(v[i]) for i in range(A.dim)}
    if isinstance(slot, (int, np.integer)):
        return {int(slot): 1.0 + 0j}
    raise DomainError(f"unknown slot {slot!r}")


def _entry_vector(A, e, k):
    if e.kind == "pinned":
        return _slot_vector(A, e.slot)
    if e.kind == "escaping":
        return _slot_vector(A, TailSlot(e.family, e.offset + k))
    phi = e.tilt / k
    out = {}
    for coord, amp in _slot_vector(A, e.slot).items():
        out[coord] = out.get(coord, 0) + math.cos(phi) * amp
    for coord, amp in _slot_vector(A, e.other).items():
        out[coord] = out.get(coord, 0) + math.sin(phi) * amp
    return out


def _limit_vector(A, e):
    if e.kind == "escaping":
        return None
    return _slot_vector(A, e.slot)


def _model_entry(A, i, j):
    """Matrix entry ``A[i, j]`` in the global basis."""
    n = A.dim
    if i < n and j < n:
        return complex(A.finite_block[i, j])
    if i != j:
        return 0j
    F = len(A.tail)
    idx = i - n
    return complex(A.tail[idx % F].entry(idx // F + 1))


def _quad(A, v):
    """``<A v, v>`` for a sparse vector."""
    keys = list(v)
    return sum((np.conj(v[i]) * _model_entry(A, i, j) * v[j] for i in keys for j in keys), 0j)


@dataclass
class DichotomyReport:
    ks: list
    traces: list
    limit_trace: complex
    escaping_mass: float
    nu: complex
    gaps: list
    trace_norms: list
    gap_residual: float
    gap_distance: float
    trace_norm: float
    branch: str

    def to_dict(self):
        return {
            "k": self.ks, "trace": [[t.real, t.imag] for t in self.traces],
            "limit_trace": [self.limit_trace.real, self.limit_trace.imag],
            "escaping_mass": self.escaping_mass, "nu": [self.nu.real, self.nu.imag],
            "gap_residual": self.gap_residual, "gap_distance": self.gap_distance,
            "trace_norm": self.trace_norm, "branch": self.branch,
        }


def dichotomy_sim(plan, K, tol=1e-6):
    """Simulate ``X_k`` from ``plan`` and report which limiting branch occurs.

    Branch ``"i"``: ``||X_K - X||_1 <= tol``.  Branch ``"ii"``: the gap
    ``tr(X_K A) - tr(X A)`` is within ``tol`` of ``mass * W_ess(A)``.
    The weak* limit ``X`` keeps pinned and tilted mass (at the tilt limit)
    and drops escaping mass.
    """
    if K < 1:
        raise DomainError("K must be positive")
    if not plan.moving:
        raise DomainError("plan does not move: every entry is pinned")
    A = plan.model
    c = [float(v) for v in plan.c.entries(len(plan.entries))]
    ks = sorted({int(k) for k in np.unique(np.geomspace(1, K, num=min(K, 25)).round())} | {int(K)})
    limit = sum((ci * _quad(A, _limit_vector(A, e)) for ci, e in zip(c, plan.entries)
                 if e.kind != "escaping"), 0j)
    mass = sum(ci for ci, e in zip(c, plan.entries) if e.kind == "escaping")
    nu = sum((ci * A.tail[e.family].value for ci, e in zip(c, plan.entries)
              if e.kind == "escaping"), 0j)
    nu = nu / mass if mass else 0j
    traces, gaps, norms = [], [], []
    for k in ks:
        t = sum((ci * _quad(A, _entry_vector(A, e, k)) for ci, e in zip(c, plan.entries)), 0j)
        traces.append(complex(t))
        gaps.append(complex(t - limit))
        norm = 0.0
        for ci, e in zip(c, plan.entries):
            if e.kind == "escaping":
                norm += ci
            elif e.kind == "tilted":
                norm += 2 * ci * abs(math.sin(e.tilt / k))
        norms.append(norm)
    gap_res = abs(gaps[-1] - mass * nu)
    ess = ess_range(A) if A.tail else np.zeros(1, dtype=complex)
    gap_dist = float(distance_to_polygon(mass * ess, gaps[-1])[0])
    if norms[-1] <= tol:
        branch = "i"
    elif gap_dist <= tol:
        branch = "ii"
    else:
        branch = "undetermined"
    return DichotomyReport(ks, traces, complex(limit), float(mass), complex(nu), gaps, norms,
                           float(gap_res), gap_dist, float(norms[-1]), branch)


@dataclass
class CompressionReport:
    ks: list
    differences: list
    zero_from: Optional[int]

    @property
    def eventually_zero(self):
        return self.zero_from is not None

    def to_dict(self):
        return {"k": self.ks, "differences": self.differences, "zero_from": self.zero_from}


def tail_compression_check(A, plan, P_dim, K):
    """``|tr(Y_k A) - tr(P' Y_k P' A)|`` for ``k = 1..K`` with ``P'`` the complement
    of the projection onto the first ``P_dim`` coordinates.
    """
    if not all(e.kind == "escaping" for e in plan.entries):
        raise DomainError("tail compression needs a plan whose mass escapes entirely")
    if P_dim < 0:
        raise DomainError("P_dim must be nonnegative")
    c = [float(v) for v in plan.c.entries(len(plan.entries))]
    diffs = []
    for k in range(1, K + 1):
        vecs = [_entry_vector(A, e, k) for e in plan.entries]
        coords = sorted(set(range(P_dim)).union(*[v.keys() for v in vecs]))
        pos = {q: i for i, q in enumerate(coords)}
        n = len(coords)
        Y = np.zeros((n, n), dtype=complex)
        for ci, v in zip(c, vecs):
            x = np.zeros(n, dtype=complex)
            for q, amp in v.items():
                x[pos[q]] = amp
            Y += ci * np.outer(x, x.conj())
        AS = np.array([[_model_entry(A, i, j) for j in coords] for i in coords], dtype=complex)
        keep = np.array([q >= P_dim for q in coords], dtype=float)
        Yc = Y * keep[:, None] * keep[None, :]
        diffs.append(float(abs(np.trace(Y @ AS) - np.trace(Yc @ AS))))
    zero_from = None
    for k in range(K, 0, -1):
        if diffs[k - 1] != 0.0:
            break
        zero_from = k
    return CompressionReport(list(range(1, K + 1)), diffs, zero_from)


# -- submajorization polytope -------------------------------------------------

def _t_transform_chain(x, y):
    """Doubly stochastic ``D`` with ``x = D y`` for sorted ``x`` majorized by sorted ``y``."""
    x = np.asarray(x, float)
    cur = np.asarray(y, float).copy()
    n = x.size
    D = np.eye(n)
    for _ in range(n):
        diff = cur - x
        if np.abs(diff).max() <= 1e-14 * max(1.0, np.abs(y).max()):
            break
        j = int(np.flatnonzero(diff > 1e-15)[-1]) if np.any(diff > 1e-15) else None
        if j is None:
            break
        k = j + 1 + int(np.flatnonzero(diff[j + 1:] < -1e-15)[0])
        delta = min(diff[j], -diff[k])
        t = 1 - delta / (cur[j] - cur[k])
        T = np.eye(n)
        T[[j, k], [j, k]] = t
        T[j, k] = T[k, j] = 1 - t
        cur = T @ cur
        D = T @ D
    return D


def _birkhoff(D, tol=1e-12):
    """Convex combination of permutation matrices equal to ``D``."""
    D = D.copy()
    terms = []
    n = D.shape[0]
    for _ in range(n * n + 1):
        if D.max() <= tol:
            break
        cost = np.where(D > tol, -np.log(np.maximum(D, tol)), 1e9)
        rows, cols = linear_sum_assignment(cost)
        w = D[rows, cols].min()
        if w <= tol:
            break
        terms.append((float(w), cols.copy()))
        D[rows, cols] -= w
    return terms


def hiai_nakamura_decomposition(x, c):
    """Write a submajorized ``x`` as a convex combination of permuted truncations of ``c``.

    Returns ``(terms, interpolant)`` where each term is ``(weight, m, perm)``
    meaning ``weight * truncate(c, m)`` with entries permuted by ``perm``
    (``out[perm[i]] = trunc[i]``).
    """
    x = np.asarray(x, float)
    c = np.asarray(c, float)
    n = max(x.size, c.size)
    xs = np.zeros(n)
    xs[: x.size] = np.sort(x)[::-1]
    cs = np.zeros(n)
    cs[: c.size] = c
    seq_x = SpectrumSeq(tuple(xs[xs > 0]))
    seq_c = SpectrumSeq(tuple(cs[cs > 0]))
    k, t, y = greedy_interpolant(seq_x, seq_c)
    ys = np.zeros(n)
    ys[: len(y.head)] = y.head
    D = _t_transform_chain(xs, ys)
    perms = _birkhoff(D)
    t = float(t)
    terms = []
    for w, perm in perms:
        # (D y)_i = sum_j D_ij y_j ; a permutation term maps y_j to row i with perm[i] = j
        inv = np.argsort(perm)
        if 1 - t > 0:
            terms.append((w * (1 - t), k - 1, inv))
        if t > 0:
            terms.append((w * t, k, inv))
    return terms, (k, t, y)


def reconstruct_from_truncations(terms, c, n):
    c = np.asarray(c, float)
    out = np.zeros(n)
    for w, m, perm in terms:
        trunc = np.zeros(n)
        trunc[:m] = c[:m]
        out[perm] += w * trunc[: n]
    return out


def truncation_hull_sample(c_fin, count, rng, parts=3):
    """Spectra of random convex combinations of ``U_j C_{m_j} U_j*``."""
    c = np.asarray(c_fin, float)
    n = c.size
    out = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(parts))
        X = np.zeros((n, n), dtype=complex)
        Us = haar_unitaries(n, parts, rng)
        for wj, U in zip(w, Us):
            m = int(rng.integers(0, n + 1))
            d = np.zeros(n)
            d[:m] = c[:m]
            X += wj * (U * d) @ U.conj().T
        out.append(np.sort(np.linalg.eigvalsh((X + X.conj().T) / 2))[::-1])
    return np.array(out)


def _submajorization_constraints(c, n):
    """``A_ub x <= b_ub`` describing ``{x >= 0 : x submajorized by c}`` in ``R^n``."""
    from itertools import combinations

    cs = np.zeros(n)
    cs[: min(n, len(c))] = np.asarray(c, float)[:n]
    prefix = np.cumsum(cs)
    rows, rhs = [], []
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            row = np.zeros(n)
            row[list(S)] = 1
            rows.append(row)
            rhs.append(prefix[k - 1])
    return np.array(rows), np.array(rhs)


def is_extreme_submajorized(x, c, tol=1e-9):
    """Whether ``x`` is an extreme point of the set of vectors submajorized by ``c``.

    Solved as small LPs: ``x`` is extreme iff no ``d != 0`` keeps both
    ``x + d`` and ``x - d`` in the set.
    """
    x = np.asarray(x, float)
    n = x.size
    if n > 5:
        raise DomainError("the LP check is limited to n <= 5")
    Aub, bub = _submajorization_constraints(c, n)
    # variables d; constraints A(x+d) <= b, A(x-d) <= b, x+d >= 0, x-d >= 0
    G = np.vstack([Aub, -Aub, -np.eye(n), np.eye(n)])
    slack = bub - Aub @ x
    h = np.concatenate([slack, slack, x, x])
    for j in range(n):
        for sign in (1.0, -1.0):
            obj = np.zeros(n)
            obj[j] = -sign
            res = linprog(obj, A_ub=G, b_ub=h + tol, bounds=[(None, None)] * n, method="highs")
            if res.status == 0 and -res.fun > 10 * tol:
                return False
    return True
